#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "incorr/geom.hpp"
#include "incorr/vec3.hpp"

namespace incorr {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;

  friend constexpr bool operator==(Rgb, Rgb) = default;
};

// "#rrggbb", lower case.
std::string to_hex(Rgb c);
std::optional<Rgb> parse_hex(std::string_view text);

// Interpreted boundary between two strata, traced as a 3D polyline.
// Rank 0 marks the greatest magnitude of change.
struct Contact {
  std::string id;
  std::string name;
  int rank = 0;
  Rgb color;
  double line_weight = 1.0;
  std::vector<Vec3> points;
  bool uncertain = false;
};

struct CrossBedMeasurement {
  std::string id;
  std::vector<Vec3> source_points;
  double dip_azimuth_deg = 0.0;
  double dip_angle_deg = 0.0;
  Vec3 centroid;
};

struct RockType {
  std::string id;
  std::string name;
  double grain_size_mm = 1.0;
  double phi = 0.0;  // Krumbein: -log2(grain_size_mm)
  Rgb color;
};

double krumbein_phi(double grain_size_mm);

RockType make_rock_type(std::string id, std::string name, double grain_size_mm, Rgb color);

// Clay through cobble, ordered from finest to coarsest.
std::vector<RockType> default_rock_catalog();

// A pick must lie within this distance of its contact's polyline.
inline constexpr double kPickSnapToleranceM = 0.5;

struct ContactPick {
  std::string contact_id;
  Vec3 point;
  double true_height_m = 0.0;  // derived from the log's reference plane
};

// Height interval (low_m, high_m]; the root spans (-inf, +inf).
struct Stratum {
  std::string id;
  double low_m = -INFINITY;
  double high_m = INFINITY;
  std::optional<std::string> lower_contact_id;
  std::optional<std::string> upper_contact_id;
  std::vector<Stratum> children;
  std::optional<std::string> rock_type_id;
  bool rock_type_uncertain = false;
  std::vector<std::string> crossbed_ids;  // sorted; leaves only

  bool is_leaf() const { return children.empty(); }
};

struct StratumTree {
  Stratum root;
};

struct GeoLog {
  std::string id;
  std::string name;
  std::string reference_contact_id;
  Plane reference_plane;
  std::vector<ContactPick> picks;  // ascending true height
  StratumTree tree;
  double anchor_elevation_m = 0.0;
};

struct ContactRef {
  std::string log_id;
  std::string contact_id;

  friend bool operator==(const ContactRef&, const ContactRef&) = default;
};

// segment_uncertain[i] styles the connection between contact_refs[i] and
// contact_refs[i + 1].
struct Correlation {
  std::string id;
  std::vector<ContactRef> contact_refs;
  std::vector<bool> segment_uncertain;
  Rgb color;
};

struct PanelStyle {
  double px_per_meter = 20.0;
  double log_gap_px = 140.0;
  double primary_width_px = 120.0;
  double secondary_width_px = 24.0;
  double phi_min = -6.0;
  double phi_max = 9.0;
  double rose_max_radius_px = 24.0;
  double font_size_px = 12.0;
  double label_font_size_px = 10.0;
  int secondary_log_level = 1;
};

struct Panel {
  std::string id = "panel";
  std::vector<std::string> log_order;
  std::vector<Correlation> correlations;
  std::optional<std::string> leveling;
  std::vector<RockType> rock_catalog;
  PanelStyle style;
};

struct DatasetMetadata {
  std::string source;
  std::string crs = "local ENU, meters, z up";
};

struct Dataset {
  std::vector<Contact> contacts;
  std::vector<CrossBedMeasurement> crossbeds;
  DatasetMetadata metadata;

  const Contact* find_contact(std::string_view id) const;
  const CrossBedMeasurement* find_crossbed(std::string_view id) const;
};

struct Project {
  Dataset dataset;
  std::vector<GeoLog> logs;
  Panel panel;

  const GeoLog* find_log(std::string_view id) const;
  GeoLog* find_log(std::string_view id);
  const Correlation* find_correlation(std::string_view id) const;
  const RockType* find_rock_type(std::string_view id) const;
};

enum class Severity { warning, error };

struct Finding {
  Severity severity = Severity::error;
  std::string subject;  // offending id, or empty for whole-document issues
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

std::string to_string(const Finding& f);

bool has_errors(const std::vector<Finding>& findings);

// Identifiers are restricted so they can be embedded in SVG ids and stratum ids.
bool is_valid_id(std::string_view id);

std::vector<Finding> validate_dataset(const Dataset& dataset);

// Dataset findings plus logs, picks, trees, correlations and panel references.
std::vector<Finding> validate_project(const Project& project);

}  // namespace incorr
