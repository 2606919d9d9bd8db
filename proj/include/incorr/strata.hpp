#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "incorr/model.hpp"

namespace incorr {

// Picks closer than this in true height are rejected as duplicates.
inline constexpr double kMinPickGapM = 1e-6;

// Stable stratum id from its bounding contacts; "*" marks an open end.
std::string stratum_id(const std::optional<std::string>& lower_contact_id,
                       const std::optional<std::string>& upper_contact_id);

// Splits the unbounded root stratum rank by rank. All contacts of one rank
// split the leaves that existed before that rank was processed, so contacts
// of equal rank always become siblings.
StratumTree build_tree(std::span<const ContactPick> picks, const std::map<std::string, int, std::less<>>& ranks);

StratumTree build_tree(std::span<const ContactPick> picks, const Dataset& dataset);

// Strata at depth `level` (root = 0) ordered bottom to top; a branch that ends
// above that depth contributes its leaf, so the cut always tiles the root.
std::vector<const Stratum*> cut_at_level(const StratumTree& tree, int level);

std::vector<const Stratum*> leaves(const StratumTree& tree);

int tree_depth(const StratumTree& tree);

const Stratum* find_stratum(const StratumTree& tree, std::string_view id);

// Returns the path from the root to the stratum (inclusive), or empty.
std::vector<const Stratum*> stratum_path(const StratumTree& tree, std::string_view id);

// Passing no rock type clears the assignment.
StratumTree assign_rock_type(const StratumTree& tree, std::string_view stratum_id,
                             const std::optional<std::string>& rock_type_id, bool uncertain,
                             std::span<const RockType> catalog);

StratumTree assign_crossbeds(const StratumTree& tree, std::string_view stratum_id,
                             std::span<const std::string> crossbed_ids, const Dataset& dataset);

// Dip azimuths of every measurement on the stratum's leaves, ordered by
// (leaf low bound, measurement id).
std::vector<double> aggregate_azimuths(const StratumTree& tree, std::string_view stratum_id, const Dataset& dataset);

// Copies leaf assignments from `previous` onto leaves of `rebuilt` that keep
// the same id; used after picks change.
StratumTree carry_over_assignments(const StratumTree& previous, StratumTree rebuilt);

// Height span used to draw the unbounded extremes: picks +/- 5 % of the log
// span, or +/- 1 m when the log has fewer than two distinct heights.
struct ClipRange {
  double low_m;
  double high_m;
};

ClipRange clip_range(std::span<const ContactPick> picks);

}  // namespace incorr
