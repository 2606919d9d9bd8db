#include "incorr/strata.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "incorr/error.hpp"

namespace incorr {

std::string stratum_id(const std::optional<std::string>& lower_contact_id,
                       const std::optional<std::string>& upper_contact_id) {
  return lower_contact_id.value_or("*") + "~" + upper_contact_id.value_or("*");
}

namespace {

struct RankedPick {
  const ContactPick* pick;
  int rank;
};

void split_leaves(Stratum& s, std::span<const RankedPick> group) {
  if (!s.is_leaf()) {
    for (Stratum& child : s.children) split_leaves(child, group);
    return;
  }
  std::vector<const ContactPick*> inside;
  for (const RankedPick& rp : group) {
    const double h = rp.pick->true_height_m;
    if (h > s.low_m && h < s.high_m) inside.push_back(rp.pick);
  }
  if (inside.empty()) return;

  std::optional<std::string> lower = s.lower_contact_id;
  double low = s.low_m;
  for (std::size_t i = 0; i <= inside.size(); ++i) {
    Stratum child;
    child.low_m = low;
    child.lower_contact_id = lower;
    if (i < inside.size()) {
      child.high_m = inside[i]->true_height_m;
      child.upper_contact_id = inside[i]->contact_id;
    } else {
      child.high_m = s.high_m;
      child.upper_contact_id = s.upper_contact_id;
    }
    child.id = stratum_id(child.lower_contact_id, child.upper_contact_id);
    low = child.high_m;
    lower = child.upper_contact_id;
    s.children.push_back(std::move(child));
  }
}

void collect_cut(const Stratum& s, int depth, int level, std::vector<const Stratum*>& out) {
  if (depth == level || s.is_leaf()) {
    out.push_back(&s);
    return;
  }
  for (const Stratum& child : s.children) collect_cut(child, depth + 1, level, out);
}

int depth_of(const Stratum& s) {
  int d = 0;
  for (const Stratum& child : s.children) d = std::max(d, 1 + depth_of(child));
  return d;
}

bool path_to(const Stratum& s, std::string_view id, std::vector<const Stratum*>& path) {
  path.push_back(&s);
  if (s.id == id) return true;
  for (const Stratum& child : s.children) {
    if (path_to(child, id, path)) return true;
  }
  path.pop_back();
  return false;
}

Stratum* find_mutable(Stratum& s, std::string_view id) {
  if (s.id == id) return &s;
  for (Stratum& child : s.children) {
    if (Stratum* found = find_mutable(child, id)) return found;
  }
  return nullptr;
}

Stratum& leaf_for_assignment(StratumTree& tree, std::string_view id, ErrorCode non_leaf_code) {
  Stratum* s = find_mutable(tree.root, id);
  if (s == nullptr) throw Error(ErrorCode::UnknownStratum, "unknown stratum '" + std::string(id) + "'", std::string(id));
  if (!s->is_leaf()) {
    throw Error(non_leaf_code, "stratum '" + std::string(id) + "' is not a leaf", std::string(id));
  }
  return *s;
}

void for_each_leaf(Stratum& s, const std::function<void(Stratum&)>& fn) {
  if (s.is_leaf()) {
    fn(s);
    return;
  }
  for (Stratum& child : s.children) for_each_leaf(child, fn);
}

}  // namespace

StratumTree build_tree(std::span<const ContactPick> picks, const std::map<std::string, int, std::less<>>& ranks) {
  std::vector<RankedPick> ranked;
  ranked.reserve(picks.size());
  std::set<std::string_view> seen;
  for (const ContactPick& p : picks) {
    const auto it = ranks.find(p.contact_id);
    if (it == ranks.end()) {
      throw Error(ErrorCode::UnknownContact, "pick references unknown contact '" + p.contact_id + "'", p.contact_id);
    }
    if (!seen.insert(p.contact_id).second) {
      throw Error(ErrorCode::DuplicatePick, "contact '" + p.contact_id + "' picked twice", p.contact_id);
    }
    ranked.push_back({&p, it->second});
  }

  std::vector<const ContactPick*> by_height;
  for (const RankedPick& rp : ranked) by_height.push_back(rp.pick);
  std::sort(by_height.begin(), by_height.end(),
            [](const ContactPick* a, const ContactPick* b) { return a->true_height_m < b->true_height_m; });
  for (std::size_t i = 1; i < by_height.size(); ++i) {
    if (by_height[i]->true_height_m - by_height[i - 1]->true_height_m <= kMinPickGapM) {
      throw Error(ErrorCode::DuplicateHeight,
                  "contacts '" + by_height[i - 1]->contact_id + "' and '" + by_height[i]->contact_id +
                      "' are picked at the same true height",
                  by_height[i]->contact_id);
    }
  }

  std::sort(ranked.begin(), ranked.end(), [](const RankedPick& a, const RankedPick& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.pick->true_height_m < b.pick->true_height_m;
  });

  StratumTree tree;
  tree.root.id = stratum_id(std::nullopt, std::nullopt);
  for (auto first = ranked.begin(); first != ranked.end();) {
    auto last = std::find_if(first, ranked.end(), [&](const RankedPick& rp) { return rp.rank != first->rank; });
    split_leaves(tree.root, std::span<const RankedPick>(&*first, static_cast<std::size_t>(last - first)));
    first = last;
  }
  return tree;
}

StratumTree build_tree(std::span<const ContactPick> picks, const Dataset& dataset) {
  std::map<std::string, int, std::less<>> ranks;
  for (const Contact& c : dataset.contacts) ranks.emplace(c.id, c.rank);
  return build_tree(picks, ranks);
}

std::vector<const Stratum*> cut_at_level(const StratumTree& tree, int level) {
  if (level < 0) throw Error(ErrorCode::InvalidArgument, "tree level must be non-negative");
  std::vector<const Stratum*> out;
  collect_cut(tree.root, 0, level, out);
  return out;
}

std::vector<const Stratum*> leaves(const StratumTree& tree) {
  std::vector<const Stratum*> out;
  collect_cut(tree.root, 0, -1, out);
  return out;
}

int tree_depth(const StratumTree& tree) { return depth_of(tree.root); }

const Stratum* find_stratum(const StratumTree& tree, std::string_view id) {
  const auto path = stratum_path(tree, id);
  return path.empty() ? nullptr : path.back();
}

std::vector<const Stratum*> stratum_path(const StratumTree& tree, std::string_view id) {
  std::vector<const Stratum*> path;
  if (!path_to(tree.root, id, path)) path.clear();
  return path;
}

StratumTree assign_rock_type(const StratumTree& tree, std::string_view stratum_id,
                             const std::optional<std::string>& rock_type_id, bool uncertain,
                             std::span<const RockType> catalog) {
  if (rock_type_id) {
    const bool known = std::any_of(catalog.begin(), catalog.end(), [&](const RockType& r) { return r.id == *rock_type_id; });
    if (!known) throw Error(ErrorCode::UnknownRockType, "unknown rock type '" + *rock_type_id + "'", *rock_type_id);
  }
  StratumTree out = tree;
  Stratum& leaf = leaf_for_assignment(out, stratum_id, ErrorCode::UnknownStratum);
  leaf.rock_type_id = rock_type_id;
  leaf.rock_type_uncertain = rock_type_id ? uncertain : false;
  return out;
}

StratumTree assign_crossbeds(const StratumTree& tree, std::string_view stratum_id,
                             std::span<const std::string> crossbed_ids, const Dataset& dataset) {
  std::vector<std::string> ids(crossbed_ids.begin(), crossbed_ids.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (const std::string& id : ids) {
    if (dataset.find_crossbed(id) == nullptr) {
      throw Error(ErrorCode::UnknownMeasurement, "unknown cross-bed measurement '" + id + "'", id);
    }
  }
  StratumTree out = tree;
  Stratum& leaf = leaf_for_assignment(out, stratum_id, ErrorCode::NonLeafTarget);
  leaf.crossbed_ids = std::move(ids);
  return out;
}

std::vector<double> aggregate_azimuths(const StratumTree& tree, std::string_view stratum_id, const Dataset& dataset) {
  const Stratum* s = find_stratum(tree, stratum_id);
  if (s == nullptr) {
    throw Error(ErrorCode::UnknownStratum, "unknown stratum '" + std::string(stratum_id) + "'", std::string(stratum_id));
  }
  std::vector<double> out;
  std::vector<const Stratum*> stack_leaves;
  collect_cut(*s, 0, -1, stack_leaves);
  for (const Stratum* leaf : stack_leaves) {
    // crossbed_ids is kept sorted, so this is already ordered by id.
    for (const std::string& id : leaf->crossbed_ids) {
      const CrossBedMeasurement* m = dataset.find_crossbed(id);
      if (m == nullptr) throw Error(ErrorCode::UnknownMeasurement, "unknown cross-bed measurement '" + id + "'", id);
      out.push_back(m->dip_azimuth_deg);
    }
  }
  return out;
}

StratumTree carry_over_assignments(const StratumTree& previous, StratumTree rebuilt) {
  for_each_leaf(rebuilt.root, [&](Stratum& leaf) {
    const Stratum* old = find_stratum(previous, leaf.id);
    if (old == nullptr || !old->is_leaf()) return;
    leaf.rock_type_id = old->rock_type_id;
    leaf.rock_type_uncertain = old->rock_type_uncertain;
    leaf.crossbed_ids = old->crossbed_ids;
  });
  return rebuilt;
}

ClipRange clip_range(std::span<const ContactPick> picks) {
  if (picks.empty()) return {-1.0, 1.0};
  double lo = INFINITY, hi = -INFINITY;
  for (const ContactPick& p : picks) {
    lo = std::min(lo, p.true_height_m);
    hi = std::max(hi, p.true_height_m);
  }
  const double margin = hi > lo ? 0.05 * (hi - lo) : 1.0;
  return {lo - margin, hi + margin};
}

}  // namespace incorr
