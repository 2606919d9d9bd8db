#pragma once

// Project-level edits shared by the CLI, the HTTP service and the loaders.
// Every operation takes the current project by const reference and returns
// the edited copy, so callers can publish snapshots atomically.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "incorr/model.hpp"

namespace incorr {

struct PickInput {
  std::string contact_id;
  Vec3 point;
};

struct StratumAssignment {
  std::string stratum_id;
  std::optional<std::string> rock_type_id;
  bool rock_type_uncertain = false;
  std::vector<std::string> crossbed_ids;
};

// Field-wise patch; absent members are left unchanged. An engaged
// rock_type_id holding nullopt clears the rock type.
struct StratumUpdate {
  std::optional<std::optional<std::string>> rock_type_id;
  std::optional<bool> uncertain;
  std::optional<std::vector<std::string>> crossbed_ids;
};

struct CorrelationInput {
  std::optional<std::string> id;
  std::vector<ContactRef> contact_refs;
  std::optional<std::vector<bool>> segment_uncertain;  // defaults to all uncertain
  std::optional<Rgb> color;                             // defaults to the first contact's color
};

Project new_project(Dataset dataset);

// Reference plane fitted to all points of a contact.
Plane preview_plane(const Dataset& dataset, std::string_view contact_id);

// Snaps a point onto the contact polyline; throws PickOutOfTolerance beyond
// kPickSnapToleranceM.
Vec3 snap_to_contact(const Dataset& dataset, const PickInput& input);

// Computes heights above the plane, sorts the picks and rebuilds the tree.
// Assignments on leaves whose ids survive are kept from `previous`.
GeoLog derive_log(const Dataset& dataset, std::string id, std::string name, std::string reference_contact_id,
                  std::span<const PickInput> picks, const StratumTree* previous = nullptr);

// Applies stored leaf assignments; throws DanglingReference for unknown
// strata, rock types or measurements.
StratumTree apply_assignments(StratumTree tree, std::span<const StratumAssignment> assignments, const Project& project);

// Leaves that carry a rock type or cross beds, bottom to top.
std::vector<StratumAssignment> collect_assignments(const StratumTree& tree);

std::string next_id(std::string_view prefix, const std::vector<std::string>& taken);

Project add_log(const Project& project, std::optional<std::string> id, std::string name,
                std::string reference_contact_id, std::span<const PickInput> picks);

Project add_pick(const Project& project, std::string_view log_id, const PickInput& pick);
Project move_pick(const Project& project, std::string_view log_id, const PickInput& pick);
// Throws ContactInUse while a correlation still references the contact.
Project remove_pick(const Project& project, std::string_view log_id, std::string_view contact_id);

Project update_stratum(const Project& project, std::string_view log_id, std::string_view stratum_id,
                       const StratumUpdate& update);

Project add_correlation(const Project& project, const CorrelationInput& input);
Project set_segment_uncertainty(const Project& project, std::string_view correlation_id, std::vector<bool> flags);
Project set_leveling(const Project& project, std::optional<std::string> correlation_id);
Project set_log_order(const Project& project, std::span<const std::string> order);

std::size_t total_picks(const Project& project);

}  // namespace incorr
