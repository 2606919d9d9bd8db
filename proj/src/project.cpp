#include "incorr/project.hpp"

#include <algorithm>
#include <set>

#include "incorr/error.hpp"
#include "incorr/geom.hpp"
#include "incorr/layout.hpp"
#include "incorr/strata.hpp"

namespace incorr {

namespace {

const Contact& require_contact(const Dataset& dataset, std::string_view id) {
  const Contact* c = dataset.find_contact(id);
  if (c == nullptr) throw Error(ErrorCode::UnknownContact, "unknown contact '" + std::string(id) + "'", std::string(id));
  return *c;
}

GeoLog& require_log(Project& project, std::string_view id) {
  GeoLog* log = project.find_log(id);
  if (log == nullptr) throw Error(ErrorCode::UnknownLog, "unknown log '" + std::string(id) + "'", std::string(id));
  return *log;
}

std::vector<PickInput> inputs_of(const GeoLog& log) {
  std::vector<PickInput> out;
  for (const ContactPick& p : log.picks) out.push_back({p.contact_id, p.point});
  return out;
}

void rederive(const Project& project, GeoLog& log, std::span<const PickInput> picks) {
  log = derive_log(project.dataset, log.id, log.name, log.reference_contact_id, picks, &log.tree);
}

bool correlated(const Project& project, std::string_view log_id, std::string_view contact_id) {
  for (const Correlation& c : project.panel.correlations) {
    for (const ContactRef& r : c.contact_refs) {
      if (r.log_id == log_id && r.contact_id == contact_id) return true;
    }
  }
  return false;
}

}  // namespace

Project new_project(Dataset dataset) {
  Project p;
  p.dataset = std::move(dataset);
  p.panel.rock_catalog = default_rock_catalog();
  return p;
}

Plane preview_plane(const Dataset& dataset, std::string_view contact_id) {
  return fit_plane(require_contact(dataset, contact_id).points);
}

Vec3 snap_to_contact(const Dataset& dataset, const PickInput& input) {
  const Contact& c = require_contact(dataset, input.contact_id);
  const PolylineProjection proj = project_onto_polyline(c.points, input.point);
  if (proj.distance_m > kPickSnapToleranceM) {
    throw Error(ErrorCode::PickOutOfTolerance,
                "point is " + std::to_string(proj.distance_m) + " m from contact '" + c.id + "'", c.id);
  }
  return proj.point;
}

GeoLog derive_log(const Dataset& dataset, std::string id, std::string name, std::string reference_contact_id,
                  std::span<const PickInput> picks, const StratumTree* previous) {
  GeoLog log;
  log.id = std::move(id);
  log.name = std::move(name);
  log.reference_contact_id = std::move(reference_contact_id);
  log.reference_plane = preview_plane(dataset, log.reference_contact_id);
  log.anchor_elevation_m = log.reference_plane.origin.z;

  std::vector<Vec3> points;
  for (const PickInput& in : picks) {
    const Contact& c = require_contact(dataset, in.contact_id);
    if (project_onto_polyline(c.points, in.point).distance_m > kPickSnapToleranceM) {
      throw Error(ErrorCode::PickOutOfTolerance, "pick is too far from contact '" + c.id + "'", c.id);
    }
    points.push_back(in.point);
  }
  const std::vector<double> heights = true_heights(log.reference_plane, points);
  for (std::size_t i = 0; i < picks.size(); ++i) log.picks.push_back({picks[i].contact_id, picks[i].point, heights[i]});
  std::sort(log.picks.begin(), log.picks.end(), [](const ContactPick& a, const ContactPick& b) {
    if (a.true_height_m != b.true_height_m) return a.true_height_m < b.true_height_m;
    return a.contact_id < b.contact_id;
  });

  log.tree = build_tree(log.picks, dataset);
  if (previous != nullptr) log.tree = carry_over_assignments(*previous, std::move(log.tree));
  return log;
}

StratumTree apply_assignments(StratumTree tree, std::span<const StratumAssignment> assignments, const Project& project) {
  for (const StratumAssignment& a : assignments) {
    const Stratum* s = find_stratum(tree, a.stratum_id);
    if (s == nullptr || !s->is_leaf()) {
      throw Error(ErrorCode::DanglingReference, "assignment references missing leaf stratum '" + a.stratum_id + "'",
                  a.stratum_id);
    }
    if (a.rock_type_id && project.find_rock_type(*a.rock_type_id) == nullptr) {
      throw Error(ErrorCode::DanglingReference, "assignment references missing rock type '" + *a.rock_type_id + "'",
                  *a.rock_type_id);
    }
    for (const std::string& id : a.crossbed_ids) {
      if (project.dataset.find_crossbed(id) == nullptr) {
        throw Error(ErrorCode::DanglingReference, "assignment references missing cross bed '" + id + "'", id);
      }
    }
    tree = assign_rock_type(tree, a.stratum_id, a.rock_type_id, a.rock_type_uncertain, project.panel.rock_catalog);
    tree = assign_crossbeds(tree, a.stratum_id, a.crossbed_ids, project.dataset);
  }
  return tree;
}

std::vector<StratumAssignment> collect_assignments(const StratumTree& tree) {
  std::vector<StratumAssignment> out;
  for (const Stratum* leaf : leaves(tree)) {
    if (!leaf->rock_type_id && leaf->crossbed_ids.empty()) continue;
    out.push_back({leaf->id, leaf->rock_type_id, leaf->rock_type_uncertain, leaf->crossbed_ids});
  }
  return out;
}

std::string next_id(std::string_view prefix, const std::vector<std::string>& taken) {
  for (std::size_t n = taken.size() + 1;; ++n) {
    std::string candidate = std::string(prefix) + std::to_string(n);
    if (std::find(taken.begin(), taken.end(), candidate) == taken.end()) return candidate;
  }
}

Project add_log(const Project& project, std::optional<std::string> id, std::string name,
                std::string reference_contact_id, std::span<const PickInput> picks) {
  std::vector<std::string> taken;
  for (const GeoLog& l : project.logs) taken.push_back(l.id);
  const std::string log_id = id.value_or(next_id("log", taken));
  if (!is_valid_id(log_id)) throw Error(ErrorCode::InvalidArgument, "invalid log id '" + log_id + "'", log_id);
  if (project.find_log(log_id) != nullptr) {
    throw Error(ErrorCode::InvalidArgument, "log '" + log_id + "' already exists", log_id);
  }
  std::vector<PickInput> snapped;
  for (const PickInput& p : picks) snapped.push_back({p.contact_id, snap_to_contact(project.dataset, p)});

  Project out = project;
  out.logs.push_back(derive_log(project.dataset, log_id, name.empty() ? log_id : std::move(name),
                                std::move(reference_contact_id), snapped));
  out.panel.log_order.push_back(log_id);
  return out;
}

Project add_pick(const Project& project, std::string_view log_id, const PickInput& pick) {
  Project out = project;
  GeoLog& log = require_log(out, log_id);
  std::vector<PickInput> picks = inputs_of(log);
  const bool exists = std::any_of(picks.begin(), picks.end(), [&](const PickInput& p) { return p.contact_id == pick.contact_id; });
  if (exists) {
    throw Error(ErrorCode::DuplicatePick, "contact '" + pick.contact_id + "' is already picked in this log", pick.contact_id);
  }
  picks.push_back({pick.contact_id, snap_to_contact(project.dataset, pick)});
  rederive(out, log, picks);
  return out;
}

Project move_pick(const Project& project, std::string_view log_id, const PickInput& pick) {
  Project out = project;
  GeoLog& log = require_log(out, log_id);
  std::vector<PickInput> picks = inputs_of(log);
  const auto it = std::find_if(picks.begin(), picks.end(), [&](const PickInput& p) { return p.contact_id == pick.contact_id; });
  if (it == picks.end()) {
    throw Error(ErrorCode::UnknownContact, "contact '" + pick.contact_id + "' is not picked in this log", pick.contact_id);
  }
  it->point = snap_to_contact(project.dataset, pick);
  rederive(out, log, picks);
  return out;
}

Project remove_pick(const Project& project, std::string_view log_id, std::string_view contact_id) {
  Project out = project;
  GeoLog& log = require_log(out, log_id);
  std::vector<PickInput> picks = inputs_of(log);
  const auto it = std::find_if(picks.begin(), picks.end(), [&](const PickInput& p) { return p.contact_id == contact_id; });
  if (it == picks.end()) {
    throw Error(ErrorCode::UnknownContact, "contact '" + std::string(contact_id) + "' is not picked in this log",
                std::string(contact_id));
  }
  if (correlated(project, log_id, contact_id)) {
    throw Error(ErrorCode::ContactInUse, "contact '" + std::string(contact_id) + "' is part of a correlation",
                std::string(contact_id));
  }
  picks.erase(it);
  rederive(out, log, picks);
  return out;
}

Project update_stratum(const Project& project, std::string_view log_id, std::string_view stratum_id,
                       const StratumUpdate& update) {
  Project out = project;
  GeoLog& log = require_log(out, log_id);
  const Stratum* s = find_stratum(log.tree, stratum_id);
  if (s == nullptr) {
    throw Error(ErrorCode::UnknownStratum, "unknown stratum '" + std::string(stratum_id) + "'", std::string(stratum_id));
  }
  if (update.rock_type_id || update.uncertain) {
    const std::optional<std::string> rock = update.rock_type_id ? *update.rock_type_id : s->rock_type_id;
    const bool uncertain = update.uncertain.value_or(s->rock_type_uncertain);
    log.tree = assign_rock_type(log.tree, stratum_id, rock, uncertain, out.panel.rock_catalog);
  }
  if (update.crossbed_ids) log.tree = assign_crossbeds(log.tree, stratum_id, *update.crossbed_ids, out.dataset);
  return out;
}

Project add_correlation(const Project& project, const CorrelationInput& input) {
  if (input.contact_refs.size() < 2) {
    throw Error(ErrorCode::InvalidCorrelation, "a correlation needs contacts from at least 2 logs");
  }
  std::set<std::string> logs_seen;
  for (const ContactRef& ref : input.contact_refs) {
    const GeoLog* log = project.find_log(ref.log_id);
    if (log == nullptr) throw Error(ErrorCode::UnknownLog, "unknown log '" + ref.log_id + "'", ref.log_id);
    if (!logs_seen.insert(ref.log_id).second) {
      throw Error(ErrorCode::InvalidCorrelation, "log '" + ref.log_id + "' appears twice", ref.log_id);
    }
    const bool picked = std::any_of(log->picks.begin(), log->picks.end(),
                                    [&](const ContactPick& p) { return p.contact_id == ref.contact_id; });
    if (!picked) {
      throw Error(ErrorCode::UnknownContact,
                  "contact '" + ref.contact_id + "' is not picked in log '" + ref.log_id + "'", ref.contact_id);
    }
  }
  const std::size_t pairs = input.contact_refs.size() - 1;
  if (input.segment_uncertain && input.segment_uncertain->size() != pairs) {
    throw Error(ErrorCode::InvalidCorrelation, "segment_uncertain needs " + std::to_string(pairs) + " entries");
  }

  std::vector<std::string> taken;
  for (const Correlation& c : project.panel.correlations) taken.push_back(c.id);
  Correlation c;
  c.id = input.id.value_or(next_id("corr", taken));
  if (!is_valid_id(c.id)) throw Error(ErrorCode::InvalidArgument, "invalid correlation id '" + c.id + "'", c.id);
  if (project.find_correlation(c.id) != nullptr) {
    throw Error(ErrorCode::InvalidArgument, "correlation '" + c.id + "' already exists", c.id);
  }
  c.contact_refs = input.contact_refs;
  c.segment_uncertain = input.segment_uncertain.value_or(std::vector<bool>(pairs, true));
  c.color = input.color.value_or(project.dataset.find_contact(c.contact_refs.front().contact_id)->color);

  Project out = project;
  out.panel.correlations.push_back(std::move(c));
  return out;
}

Project set_segment_uncertainty(const Project& project, std::string_view correlation_id, std::vector<bool> flags) {
  Project out = project;
  auto& cs = out.panel.correlations;
  const auto it = std::find_if(cs.begin(), cs.end(), [&](const Correlation& c) { return c.id == correlation_id; });
  if (it == cs.end()) {
    throw Error(ErrorCode::UnknownCorrelation, "unknown correlation '" + std::string(correlation_id) + "'",
                std::string(correlation_id));
  }
  if (flags.size() + 1 != it->contact_refs.size()) {
    throw Error(ErrorCode::InvalidCorrelation, "segment_uncertain needs one entry per adjacent pair", it->id);
  }
  it->segment_uncertain = std::move(flags);
  return out;
}

Project set_leveling(const Project& project, std::optional<std::string> correlation_id) {
  if (correlation_id && project.find_correlation(*correlation_id) == nullptr) {
    throw Error(ErrorCode::UnknownCorrelation, "unknown correlation '" + *correlation_id + "'", *correlation_id);
  }
  Project out = project;
  out.panel.leveling = std::move(correlation_id);
  // Surfaces a baseline that spans fewer than two logs before it is stored.
  compute_offsets(out.panel, out.logs);
  return out;
}

Project set_log_order(const Project& project, std::span<const std::string> order) {
  Project out = project;
  out.panel = reorder_logs(project.panel, order);
  return out;
}

std::size_t total_picks(const Project& project) {
  std::size_t n = 0;
  for (const GeoLog& l : project.logs) n += l.picks.size();
  return n;
}

}  // namespace incorr
