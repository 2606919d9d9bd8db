#include "incorr/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "incorr/strata.hpp"

namespace incorr {

std::string to_hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

std::optional<Rgb> parse_hex(std::string_view text) {
  if (text.size() != 7 || text[0] != '#') return std::nullopt;
  auto nibble = [](char ch) -> int {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
    return -1;
  };
  std::uint8_t v[3];
  for (int i = 0; i < 3; ++i) {
    const int hi = nibble(text[1 + 2 * i]), lo = nibble(text[2 + 2 * i]);
    if (hi < 0 || lo < 0) return std::nullopt;
    v[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return Rgb{v[0], v[1], v[2]};
}

double krumbein_phi(double grain_size_mm) { return -std::log2(grain_size_mm); }

RockType make_rock_type(std::string id, std::string name, double grain_size_mm, Rgb color) {
  return RockType{std::move(id), std::move(name), grain_size_mm, krumbein_phi(grain_size_mm), color};
}

std::vector<RockType> default_rock_catalog() {
  return {
      make_rock_type("clay", "Clay", 0.002, {0x8e, 0x8e, 0x9e}),
      make_rock_type("silt", "Silt", 0.0625, {0xb5, 0xa5, 0x8a}),
      make_rock_type("vf-sand", "Very fine sand", 0.125, {0xf3, 0xe6, 0xa0}),
      make_rock_type("f-sand", "Fine sand", 0.25, {0xf5, 0xd7, 0x6e}),
      make_rock_type("m-sand", "Medium sand", 0.5, {0xf0, 0xc0, 0x40}),
      make_rock_type("c-sand", "Coarse sand", 1.0, {0xe0, 0xa0, 0x30}),
      make_rock_type("pebble", "Pebble", 16.0, {0xc0, 0x80, 0x40}),
      make_rock_type("cobble", "Cobble", 63.0, {0x9a, 0x6a, 0x3a}),
  };
}

const Contact* Dataset::find_contact(std::string_view id) const {
  const auto it = std::find_if(contacts.begin(), contacts.end(), [&](const Contact& c) { return c.id == id; });
  return it == contacts.end() ? nullptr : &*it;
}

const CrossBedMeasurement* Dataset::find_crossbed(std::string_view id) const {
  const auto it = std::find_if(crossbeds.begin(), crossbeds.end(), [&](const CrossBedMeasurement& c) { return c.id == id; });
  return it == crossbeds.end() ? nullptr : &*it;
}

const GeoLog* Project::find_log(std::string_view id) const {
  const auto it = std::find_if(logs.begin(), logs.end(), [&](const GeoLog& l) { return l.id == id; });
  return it == logs.end() ? nullptr : &*it;
}

GeoLog* Project::find_log(std::string_view id) {
  const auto it = std::find_if(logs.begin(), logs.end(), [&](const GeoLog& l) { return l.id == id; });
  return it == logs.end() ? nullptr : &*it;
}

const Correlation* Project::find_correlation(std::string_view id) const {
  const auto& cs = panel.correlations;
  const auto it = std::find_if(cs.begin(), cs.end(), [&](const Correlation& c) { return c.id == id; });
  return it == cs.end() ? nullptr : &*it;
}

const RockType* Project::find_rock_type(std::string_view id) const {
  const auto& rs = panel.rock_catalog;
  const auto it = std::find_if(rs.begin(), rs.end(), [&](const RockType& r) { return r.id == id; });
  return it == rs.end() ? nullptr : &*it;
}

std::string to_string(const Finding& f) {
  std::string out = f.severity == Severity::error ? "error: " : "warning: ";
  if (!f.subject.empty()) out += f.subject + ": ";
  return out + f.message;
}

bool has_errors(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(), [](const Finding& f) { return f.severity == Severity::error; });
}

bool is_valid_id(std::string_view id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_' ||
           ch == '-' || ch == '.' || ch == ':';
  });
}

namespace {

class Findings {
 public:
  void error(std::string subject, std::string message) {
    items_.push_back({Severity::error, std::move(subject), std::move(message)});
  }
  void warning(std::string subject, std::string message) {
    items_.push_back({Severity::warning, std::move(subject), std::move(message)});
  }
  void append(const std::vector<Finding>& more) { items_.insert(items_.end(), more.begin(), more.end()); }
  std::vector<Finding> take() { return std::move(items_); }

 private:
  std::vector<Finding> items_;
};

bool finite(Vec3 p) { return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z); }

template <class Range, class IdOf>
void check_ids(Findings& out, const Range& items, IdOf id_of, const char* what) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    const std::string& id = id_of(item);
    if (!is_valid_id(id)) out.error(id, std::string(what) + " id is empty or has characters outside [A-Za-z0-9_.:-]");
    if (!seen.insert(id).second) out.error(id, std::string("duplicate ") + what + " id");
  }
}

void check_tree_node(Findings& out, const GeoLog& log, const Project& project, const Stratum& s) {
  if (!(s.low_m < s.high_m)) out.error(log.id + "/" + s.id, "stratum interval is empty");
  if (!s.is_leaf()) {
    if (!s.crossbed_ids.empty()) out.error(log.id + "/" + s.id, "cross beds assigned to a non-leaf stratum");
    if (s.rock_type_id) out.error(log.id + "/" + s.id, "rock type assigned to a non-leaf stratum");
    if (s.children.front().low_m != s.low_m || s.children.back().high_m != s.high_m) {
      out.error(log.id + "/" + s.id, "children do not span the parent interval");
    }
    for (std::size_t i = 0; i + 1 < s.children.size(); ++i) {
      if (s.children[i].high_m != s.children[i + 1].low_m) {
        out.error(log.id + "/" + s.id, "children leave a gap or overlap");
      }
    }
    for (const Stratum& child : s.children) check_tree_node(out, log, project, child);
    return;
  }
  if (s.rock_type_id && project.find_rock_type(*s.rock_type_id) == nullptr) {
    out.error(log.id + "/" + s.id, "unknown rock type '" + *s.rock_type_id + "'");
  }
  for (const std::string& id : s.crossbed_ids) {
    if (project.dataset.find_crossbed(id) == nullptr) out.error(log.id + "/" + s.id, "unknown cross bed '" + id + "'");
  }
}

}  // namespace

std::vector<Finding> validate_dataset(const Dataset& dataset) {
  Findings out;
  check_ids(out, dataset.contacts, [](const Contact& c) -> const std::string& { return c.id; }, "contact");
  check_ids(out, dataset.crossbeds, [](const CrossBedMeasurement& m) -> const std::string& { return m.id; }, "cross bed");

  for (const Contact& c : dataset.contacts) {
    if (c.points.size() < 2) out.error(c.id, "contact points.len < 2");
    if (c.rank < 0) out.error(c.id, "contact rank must be >= 0");
    if (!(c.line_weight > 0.0)) out.error(c.id, "contact line_weight must be > 0");
    if (!std::all_of(c.points.begin(), c.points.end(), finite)) out.error(c.id, "contact has non-finite coordinates");
  }
  for (const CrossBedMeasurement& m : dataset.crossbeds) {
    if (!(m.dip_azimuth_deg >= 0.0 && m.dip_azimuth_deg < 360.0)) out.error(m.id, "dip_azimuth_deg outside [0, 360)");
    if (!(m.dip_angle_deg >= 0.0 && m.dip_angle_deg <= 90.0)) out.error(m.id, "dip_angle_deg outside [0, 90]");
    if (!m.source_points.empty() && m.source_points.size() < 3) out.error(m.id, "cross bed needs >= 3 source points");
    if (!finite(m.centroid) || !std::all_of(m.source_points.begin(), m.source_points.end(), finite)) {
      out.error(m.id, "cross bed has non-finite coordinates");
    }
  }
  return out.take();
}

std::vector<Finding> validate_project(const Project& project) {
  Findings out;
  out.append(validate_dataset(project.dataset));
  const Panel& panel = project.panel;

  check_ids(out, project.logs, [](const GeoLog& l) -> const std::string& { return l.id; }, "log");
  check_ids(out, panel.rock_catalog, [](const RockType& r) -> const std::string& { return r.id; }, "rock type");
  check_ids(out, panel.correlations, [](const Correlation& c) -> const std::string& { return c.id; }, "correlation");

  for (const RockType& r : panel.rock_catalog) {
    if (!(r.grain_size_mm > 0.0)) out.error(r.id, "grain_size_mm must be > 0");
    else if (std::abs(r.phi - krumbein_phi(r.grain_size_mm)) > 1e-9) out.error(r.id, "phi != -log2(grain_size_mm)");
  }

  for (const GeoLog& log : project.logs) {
    if (project.dataset.find_contact(log.reference_contact_id) == nullptr) {
      out.error(log.id, "reference contact '" + log.reference_contact_id + "' does not exist");
    }
    std::set<std::string> picked;
    for (std::size_t i = 0; i < log.picks.size(); ++i) {
      const ContactPick& p = log.picks[i];
      if (!picked.insert(p.contact_id).second) out.error(log.id, "contact '" + p.contact_id + "' picked twice");
      if (i > 0 && !(log.picks[i - 1].true_height_m < p.true_height_m)) {
        out.error(log.id, "picks are not strictly ascending in true height");
      }
      const Contact* c = project.dataset.find_contact(p.contact_id);
      if (c == nullptr) {
        out.error(log.id, "pick references unknown contact '" + p.contact_id + "'");
      } else if (c->points.size() >= 2 && project_onto_polyline(c->points, p.point).distance_m > kPickSnapToleranceM) {
        out.error(log.id, "pick for '" + p.contact_id + "' is farther than the snap tolerance from the contact");
      }
    }
    if (leaves(log.tree).size() != log.picks.size() + 1) out.error(log.id, "tree leaf count != picks + 1");
    check_tree_node(out, log, project, log.tree.root);
  }

  std::multiset<std::string> ordered(panel.log_order.begin(), panel.log_order.end());
  std::multiset<std::string> existing;
  for (const GeoLog& log : project.logs) existing.insert(log.id);
  if (ordered != existing) out.error(panel.id, "log_order is not a permutation of the project's logs");

  for (const Correlation& c : panel.correlations) {
    if (c.contact_refs.size() < 2) out.error(c.id, "correlation needs at least 2 contacts");
    if (c.segment_uncertain.size() + 1 != c.contact_refs.size() && !c.contact_refs.empty()) {
      out.error(c.id, "segment_uncertain must have one entry per adjacent pair");
    }
    std::set<std::string> logs_seen;
    for (const ContactRef& ref : c.contact_refs) {
      if (!logs_seen.insert(ref.log_id).second) out.error(c.id, "log '" + ref.log_id + "' appears twice");
      const GeoLog* log = project.find_log(ref.log_id);
      if (log == nullptr) {
        out.error(c.id, "unknown log '" + ref.log_id + "'");
        continue;
      }
      const bool picked = std::any_of(log->picks.begin(), log->picks.end(),
                                      [&](const ContactPick& p) { return p.contact_id == ref.contact_id; });
      if (!picked) out.error(c.id, "contact '" + ref.contact_id + "' is not picked in log '" + ref.log_id + "'");
    }
  }
  if (panel.leveling && project.find_correlation(*panel.leveling) == nullptr) {
    out.error(panel.id, "leveling references unknown correlation '" + *panel.leveling + "'");
  }

  const PanelStyle& st = panel.style;
  if (!(st.px_per_meter > 0.0)) out.error(panel.id, "style.px_per_meter must be > 0");
  if (!(st.phi_min < st.phi_max)) out.error(panel.id, "style.phi_min must be < style.phi_max");
  if (!(st.rose_max_radius_px > 0.0)) out.error(panel.id, "style.rose_max_radius_px must be > 0");
  if (st.secondary_log_level < 0) out.error(panel.id, "style.secondary_log_level must be >= 0");
  return out.take();
}

}  // namespace incorr
