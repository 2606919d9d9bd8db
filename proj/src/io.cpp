#include "incorr/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "incorr/strata.hpp"

namespace incorr {

namespace {

std::string join_findings(const std::vector<Finding>& findings) {
  std::string msg = "validation failed";
  for (const Finding& f : findings) {
    if (f.severity == Severity::error) msg += "\n  " + to_string(f);
  }
  return msg;
}

std::vector<Finding> errors_only(std::vector<Finding> findings) {
  std::erase_if(findings, [](const Finding& f) { return f.severity != Severity::error; });
  return findings;
}

bool close_enough(double stored, double derived) {
  return std::abs(stored - derived) <= 1e-8 * std::max(1.0, std::abs(derived));
}

Json num(double v) { return round_sig9(v); }

Json bound(double v) { return std::isfinite(v) ? num(v) : Json(nullptr); }

Json opt_string(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

Json rock_to_json(const RockType& r) {
  Json j;
  j["id"] = r.id;
  j["name"] = r.name;
  j["grain_size_mm"] = num(r.grain_size_mm);
  j["phi"] = num(r.phi);
  j["color"] = to_hex(r.color);
  return j;
}

Json style_to_json(const PanelStyle& s) {
  Json j;
  j["px_per_meter"] = num(s.px_per_meter);
  j["log_gap_px"] = num(s.log_gap_px);
  j["primary_width_px"] = num(s.primary_width_px);
  j["secondary_width_px"] = num(s.secondary_width_px);
  j["phi_min"] = num(s.phi_min);
  j["phi_max"] = num(s.phi_max);
  j["rose_max_radius_px"] = num(s.rose_max_radius_px);
  j["font_size_px"] = num(s.font_size_px);
  j["label_font_size_px"] = num(s.label_font_size_px);
  j["secondary_log_level"] = s.secondary_log_level;
  return j;
}

Json points_to_json(const std::vector<Vec3>& pts) {
  Json arr = Json::array();
  for (const Vec3& p : pts) arr.push_back(vec_to_json(p));
  return arr;
}

Dataset parse_dataset(const JsonReader& r, std::vector<Finding>& warnings) {
  const std::string schema = r.string("schema");
  if (schema != kDatasetSchema) r.at("schema").fail("unsupported schema '" + schema + "'");

  Dataset d;
  if (r.has("metadata")) {
    const JsonReader m = r.at("metadata");
    if (m.has("source")) d.metadata.source = m.string("source");
    if (m.has("crs")) d.metadata.crs = m.string("crs");
  }

  const JsonReader contacts = r.at("contacts");
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    const JsonReader c = contacts.at(i);
    Contact contact;
    contact.id = c.string("id");
    contact.name = c.has("name") ? c.string("name") : contact.id;
    contact.rank = static_cast<int>(c.integer("rank"));
    contact.color = c.has("color") ? c.color("color") : Rgb{};
    contact.line_weight = c.has("line_weight") ? c.number("line_weight") : 1.0;
    contact.uncertain = c.has("uncertain") ? c.boolean("uncertain") : false;
    contact.points = c.vec3_list("points");
    d.contacts.push_back(std::move(contact));
  }

  if (r.has("crossbeds")) {
    const JsonReader beds = r.at("crossbeds");
    for (std::size_t i = 0; i < beds.size(); ++i) {
      const JsonReader b = beds.at(i);
      CrossBedMeasurement m;
      m.id = b.string("id");
      if (b.has("source_points")) m.source_points = b.vec3_list("source_points");
      const bool derive = m.source_points.size() >= 3;
      if (!derive || b.has("dip_azimuth_deg")) m.dip_azimuth_deg = b.number("dip_azimuth_deg");
      if (!derive || b.has("dip_angle_deg")) m.dip_angle_deg = b.number("dip_angle_deg");
      if (b.has("centroid")) m.centroid = b.vec3("centroid");
      if (derive) {
        const double stored_az = m.dip_azimuth_deg, stored_dip = m.dip_angle_deg;
        try {
          const Plane plane = fit_plane(m.source_points);
          const DipStrike ds = dip_and_strike(plane);
          m.centroid = plane.origin;
          m.dip_angle_deg = ds.dip_angle_deg;
          if (ds.dip_azimuth_deg) {
            m.dip_azimuth_deg = *ds.dip_azimuth_deg;
          } else {
            warnings.push_back({Severity::warning, m.id, "near-horizontal cross bed; keeping stored dip azimuth"});
          }
        } catch (const Error& e) {
          warnings.push_back({Severity::error, m.id, std::string("cannot fit source points: ") + e.what()});
        }
        if (b.has("dip_angle_deg") && !close_enough(stored_dip, m.dip_angle_deg)) {
          warnings.push_back({Severity::warning, m.id, "stored dip_angle_deg differs from the fitted value"});
        }
        if (b.has("dip_azimuth_deg") && !close_enough(stored_az, m.dip_azimuth_deg)) {
          warnings.push_back({Severity::warning, m.id, "stored dip_azimuth_deg differs from the fitted value"});
        }
      }
      d.crossbeds.push_back(std::move(m));
    }
  }
  return d;
}

void compare_tree(const Stratum& derived, const JsonReader& stored, const std::string& log_id,
                  std::vector<Finding>& warnings) {
  const Json& j = stored.node();
  auto mismatch = [&] {
    warnings.push_back({Severity::warning, log_id, "stored tree differs from the rebuilt tree at " + stored.path()});
  };
  if (!j.is_object() || !j.contains("id") || j["id"] != derived.id) return mismatch();
  auto same_bound = [](const Json& b, double v) {
    if (!std::isfinite(v)) return b.is_null();
    return b.is_number() && close_enough(b.get<double>(), v);
  };
  if (!same_bound(j.value("low_m", Json()), derived.low_m) || !same_bound(j.value("high_m", Json()), derived.high_m)) {
    return mismatch();
  }
  const Json children = j.value("children", Json::array());
  if (!children.is_array() || children.size() != derived.children.size()) return mismatch();
  const JsonReader kids = stored.at("children");
  for (std::size_t i = 0; i < derived.children.size(); ++i) compare_tree(derived.children[i], kids.at(i), log_id, warnings);
}

}  // namespace

ValidationFailure::ValidationFailure(std::vector<Finding> findings)
    : Error(ErrorCode::ValidationError, join_findings(findings),
            findings.empty() ? std::string() : findings.front().subject),
      findings_(std::move(findings)) {}

double round_sig9(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

Json vec_to_json(Vec3 v) { return Json::array({num(v.x), num(v.y), num(v.z)}); }

Json plane_to_json(const Plane& plane) {
  Json j;
  j["origin"] = vec_to_json(plane.origin);
  j["normal"] = vec_to_json(plane.normal);
  j["rms_residual_m"] = num(plane.rms_residual_m);
  return j;
}

Json dip_strike_to_json(const DipStrike& ds) {
  Json j;
  j["dip_angle_deg"] = num(ds.dip_angle_deg);
  j["dip_azimuth_deg"] = ds.dip_azimuth_deg ? num(*ds.dip_azimuth_deg) : Json(nullptr);
  j["strike_azimuth_deg"] = ds.strike_azimuth_deg ? num(*ds.strike_azimuth_deg) : Json(nullptr);
  return j;
}

Json dataset_to_json(const Dataset& dataset) {
  Json j;
  j["schema"] = kDatasetSchema;
  j["metadata"] = {{"source", dataset.metadata.source}, {"crs", dataset.metadata.crs}};
  Json contacts = Json::array();
  for (const Contact& c : dataset.contacts) {
    Json cj;
    cj["id"] = c.id;
    cj["name"] = c.name;
    cj["rank"] = c.rank;
    cj["color"] = to_hex(c.color);
    cj["line_weight"] = num(c.line_weight);
    cj["uncertain"] = c.uncertain;
    cj["points"] = points_to_json(c.points);
    contacts.push_back(std::move(cj));
  }
  j["contacts"] = std::move(contacts);
  Json beds = Json::array();
  for (const CrossBedMeasurement& m : dataset.crossbeds) {
    Json bj;
    bj["id"] = m.id;
    bj["source_points"] = points_to_json(m.source_points);
    bj["dip_azimuth_deg"] = num(m.dip_azimuth_deg);
    bj["dip_angle_deg"] = num(m.dip_angle_deg);
    bj["centroid"] = vec_to_json(m.centroid);
    beds.push_back(std::move(bj));
  }
  j["crossbeds"] = std::move(beds);
  return j;
}

Json tree_to_json(const Stratum& s) {
  Json j;
  j["id"] = s.id;
  j["low_m"] = bound(s.low_m);
  j["high_m"] = bound(s.high_m);
  j["lower_contact_id"] = opt_string(s.lower_contact_id);
  j["upper_contact_id"] = opt_string(s.upper_contact_id);
  Json kids = Json::array();
  for (const Stratum& c : s.children) kids.push_back(tree_to_json(c));
  j["children"] = std::move(kids);
  return j;
}

Json log_to_json(const GeoLog& log) {
  Json j;
  j["id"] = log.id;
  j["name"] = log.name;
  j["reference_contact_id"] = log.reference_contact_id;
  j["reference_plane"] = plane_to_json(log.reference_plane);
  j["anchor_elevation_m"] = num(log.anchor_elevation_m);
  Json picks = Json::array();
  for (const ContactPick& p : log.picks) {
    picks.push_back({{"contact_id", p.contact_id}, {"point", vec_to_json(p.point)}, {"true_height_m", num(p.true_height_m)}});
  }
  j["picks"] = std::move(picks);
  Json strata = Json::array();
  for (const StratumAssignment& a : collect_assignments(log.tree)) {
    Json aj;
    aj["id"] = a.stratum_id;
    aj["rock_type_id"] = opt_string(a.rock_type_id);
    aj["rock_type_uncertain"] = a.rock_type_uncertain;
    aj["crossbed_ids"] = a.crossbed_ids;
    strata.push_back(std::move(aj));
  }
  j["strata"] = std::move(strata);
  j["leaf_count"] = leaves(log.tree).size();
  j["tree"] = tree_to_json(log.tree.root);
  return j;
}

Json correlation_to_json(const Correlation& c) {
  Json j;
  j["id"] = c.id;
  Json refs = Json::array();
  for (const ContactRef& r : c.contact_refs) refs.push_back({{"log_id", r.log_id}, {"contact_id", r.contact_id}});
  j["contact_refs"] = std::move(refs);
  Json flags = Json::array();
  for (bool b : c.segment_uncertain) flags.push_back(b);
  j["segment_uncertain"] = std::move(flags);
  j["color"] = to_hex(c.color);
  return j;
}

Json project_to_json(const Project& project) {
  Json j;
  j["schema"] = kProjectSchema;
  j["dataset"] = dataset_to_json(project.dataset);
  Json logs = Json::array();
  for (const GeoLog& l : project.logs) logs.push_back(log_to_json(l));
  j["logs"] = std::move(logs);

  const Panel& p = project.panel;
  Json pj;
  pj["id"] = p.id;
  pj["log_order"] = p.log_order;
  Json cs = Json::array();
  for (const Correlation& c : p.correlations) cs.push_back(correlation_to_json(c));
  pj["correlations"] = std::move(cs);
  pj["leveling"] = opt_string(p.leveling);
  Json rocks = Json::array();
  for (const RockType& r : p.rock_catalog) rocks.push_back(rock_to_json(r));
  pj["rock_catalog"] = std::move(rocks);
  pj["style"] = style_to_json(p.style);
  j["panel"] = std::move(pj);
  return j;
}

Json strip_to_json(const OutcropStrip& strip) {
  Json j;
  j["axis"] = Json::array({num(strip.axis_x), num(strip.axis_y)});
  j["s_min"] = num(strip.s_min);
  j["s_max"] = num(strip.s_max);
  Json lines = Json::array();
  for (const StripPolyline& pl : strip.polylines) {
    Json pts = Json::array();
    for (const StripPoint& p : pl.points) pts.push_back(Json::array({num(p.s), num(p.z)}));
    lines.push_back({{"contact_id", pl.contact_id}, {"points", std::move(pts)}});
  }
  j["polylines"] = std::move(lines);
  return j;
}

Json parse_json(std::string_view bytes) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what());
  }
}

Dataset load_dataset(std::string_view bytes) {
  std::vector<Finding> warnings;
  return load_dataset(bytes, warnings);
}

Dataset load_dataset(std::string_view bytes, std::vector<Finding>& warnings) {
  const Json doc = parse_json(bytes);
  const JsonReader root(doc, "");
  std::vector<Finding> notes;
  Dataset d = parse_dataset(root, notes);
  std::vector<Finding> findings = validate_dataset(d);
  findings.insert(findings.end(), notes.begin(), notes.end());
  if (has_errors(findings)) throw ValidationFailure(errors_only(findings));
  warnings.insert(warnings.end(), findings.begin(), findings.end());
  return d;
}

std::string save_dataset(const Dataset& dataset) { return dataset_to_json(dataset).dump(2) + "\n"; }

LoadedProject load_project(std::string_view bytes) {
  const Json doc = parse_json(bytes);
  const JsonReader root(doc, "");
  const std::string schema = root.string("schema");
  if (schema != kProjectSchema) root.at("schema").fail("unsupported schema '" + schema + "'");

  LoadedProject out;
  std::vector<Finding>& warnings = out.warnings;
  Project& p = out.project;
  p.dataset = parse_dataset(root.at("dataset"), warnings);
  {
    std::vector<Finding> findings = validate_dataset(p.dataset);
    findings.insert(findings.end(), warnings.begin(), warnings.end());
    if (has_errors(findings)) throw ValidationFailure(errors_only(findings));
  }

  const JsonReader panel = root.at("panel");
  p.panel.id = panel.string("id");
  const JsonReader rocks = panel.at("rock_catalog");
  for (std::size_t i = 0; i < rocks.size(); ++i) {
    const JsonReader r = rocks.at(i);
    RockType rock = make_rock_type(r.string("id"), r.string("name"), r.number("grain_size_mm"), r.color("color"));
    if (r.has("phi") && !close_enough(r.number("phi"), rock.phi)) {
      warnings.push_back({Severity::warning, rock.id, "stored phi differs from -log2(grain_size_mm)"});
    }
    p.panel.rock_catalog.push_back(std::move(rock));
  }
  if (panel.has("style")) {
    const JsonReader s = panel.at("style");
    PanelStyle& st = p.panel.style;
    st.px_per_meter = s.number("px_per_meter");
    st.log_gap_px = s.number("log_gap_px");
    st.primary_width_px = s.number("primary_width_px");
    st.secondary_width_px = s.number("secondary_width_px");
    st.phi_min = s.number("phi_min");
    st.phi_max = s.number("phi_max");
    st.rose_max_radius_px = s.number("rose_max_radius_px");
    st.font_size_px = s.number("font_size_px");
    st.label_font_size_px = s.number("label_font_size_px");
    st.secondary_log_level = static_cast<int>(s.integer("secondary_log_level"));
  }

  const JsonReader logs = root.at("logs");
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const JsonReader l = logs.at(i);
    const std::string id = l.string("id");
    const std::string ref = l.string("reference_contact_id");
    if (p.dataset.find_contact(ref) == nullptr) {
      throw Error(ErrorCode::DanglingReference, "log '" + id + "' references missing contact '" + ref + "'", ref);
    }
    std::vector<PickInput> picks;
    const JsonReader pj = l.at("picks");
    for (std::size_t k = 0; k < pj.size(); ++k) {
      const JsonReader pick = pj.at(k);
      PickInput in{pick.string("contact_id"), pick.vec3("point")};
      if (p.dataset.find_contact(in.contact_id) == nullptr) {
        throw Error(ErrorCode::DanglingReference,
                    "log '" + id + "' picks missing contact '" + in.contact_id + "'", in.contact_id);
      }
      picks.push_back(std::move(in));
    }
    GeoLog log = derive_log(p.dataset, id, l.has("name") ? l.string("name") : id, ref, picks);

    for (std::size_t k = 0; k < pj.size(); ++k) {
      const JsonReader pick = pj.at(k);
      if (!pick.has("true_height_m")) continue;
      const std::string cid = pick.string("contact_id");
      const auto it = std::find_if(log.picks.begin(), log.picks.end(),
                                   [&](const ContactPick& cp) { return cp.contact_id == cid; });
      if (!close_enough(pick.number("true_height_m"), it->true_height_m)) {
        warnings.push_back({Severity::warning, id + "/" + cid, "stored true_height_m differs from the recomputed value"});
      }
    }
    if (l.has("anchor_elevation_m") && !close_enough(l.number("anchor_elevation_m"), log.anchor_elevation_m)) {
      warnings.push_back({Severity::warning, id, "stored anchor_elevation_m differs from the reference plane"});
    }
    if (l.has("tree")) compare_tree(log.tree.root, l.at("tree"), id, warnings);

    std::vector<StratumAssignment> assignments;
    if (l.has("strata")) {
      const JsonReader sj = l.at("strata");
      for (std::size_t k = 0; k < sj.size(); ++k) {
        const JsonReader a = sj.at(k);
        StratumAssignment sa;
        sa.stratum_id = a.string("id");
        if (a.has("rock_type_id") && !a.is_null("rock_type_id")) sa.rock_type_id = a.string("rock_type_id");
        sa.rock_type_uncertain = a.has("rock_type_uncertain") ? a.boolean("rock_type_uncertain") : false;
        if (a.has("crossbed_ids")) sa.crossbed_ids = a.string_list("crossbed_ids");
        assignments.push_back(std::move(sa));
      }
    }
    log.tree = apply_assignments(std::move(log.tree), assignments, p);
    p.logs.push_back(std::move(log));
  }

  p.panel.log_order = panel.string_list("log_order");
  for (const std::string& id : p.panel.log_order) {
    if (p.find_log(id) == nullptr) {
      throw Error(ErrorCode::DanglingReference, "log_order references missing log '" + id + "'", id);
    }
  }
  const JsonReader cs = panel.at("correlations");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const JsonReader c = cs.at(i);
    Correlation corr;
    corr.id = c.string("id");
    const JsonReader refs = c.at("contact_refs");
    for (std::size_t k = 0; k < refs.size(); ++k) {
      const JsonReader r = refs.at(k);
      ContactRef ref{r.string("log_id"), r.string("contact_id")};
      const GeoLog* log = p.find_log(ref.log_id);
      if (log == nullptr) {
        throw Error(ErrorCode::DanglingReference,
                    "correlation '" + corr.id + "' references missing log '" + ref.log_id + "'", ref.log_id);
      }
      const bool picked = std::any_of(log->picks.begin(), log->picks.end(),
                                      [&](const ContactPick& pk) { return pk.contact_id == ref.contact_id; });
      if (!picked) {
        throw Error(ErrorCode::DanglingReference,
                    "correlation '" + corr.id + "' references contact '" + ref.contact_id +
                        "' that is not picked in log '" + ref.log_id + "'",
                    ref.contact_id);
      }
      corr.contact_refs.push_back(std::move(ref));
    }
    const JsonReader flags = c.at("segment_uncertain");
    for (std::size_t k = 0; k < flags.size(); ++k) {
      const Json& f = flags.at(k).node();
      if (!f.is_boolean()) flags.at(k).fail("expected boolean");
      corr.segment_uncertain.push_back(f.get<bool>());
    }
    corr.color = c.color("color");
    p.panel.correlations.push_back(std::move(corr));
  }
  if (!panel.is_null("leveling")) {
    const std::string lv = panel.string("leveling");
    if (p.find_correlation(lv) == nullptr) {
      throw Error(ErrorCode::DanglingReference, "leveling references missing correlation '" + lv + "'", lv);
    }
    p.panel.leveling = lv;
  }

  std::vector<Finding> findings = validate_project(p);
  if (has_errors(findings)) throw ValidationFailure(errors_only(findings));
  warnings.insert(warnings.end(), findings.begin(), findings.end());
  return out;
}

std::string save_project(const Project& project) { return project_to_json(project).dump(2) + "\n"; }

bool JsonReader::has(std::string_view key) const {
  return node_.is_object() && node_.contains(std::string(key));
}

bool JsonReader::is_null(std::string_view key) const { return at(key).node().is_null(); }

JsonReader JsonReader::at(std::string_view key) const {
  const std::string child = path_ + "/" + std::string(key);
  if (!node_.is_object()) fail("expected object");
  const auto it = node_.find(std::string(key));
  if (it == node_.end()) throw Error(ErrorCode::SchemaError, child + " missing");
  return JsonReader(*it, child);
}

JsonReader JsonReader::at(std::size_t index) const {
  if (!node_.is_array()) fail("expected array");
  if (index >= node_.size()) fail("index " + std::to_string(index) + " out of range");
  return JsonReader(node_[index], path_ + "/" + std::to_string(index));
}

std::size_t JsonReader::size() const {
  if (!node_.is_array()) fail("expected array");
  return node_.size();
}

std::string JsonReader::string(std::string_view key) const { return at(key).as_string(); }

std::string JsonReader::as_string() const {
  if (!node_.is_string()) fail("expected string");
  return node_.get<std::string>();
}

double JsonReader::number(std::string_view key) const {
  const JsonReader r = at(key);
  if (!r.node().is_number()) r.fail("expected number");
  const double v = r.node().get<double>();
  if (!std::isfinite(v)) r.fail("expected finite number");
  return v;
}

long long JsonReader::integer(std::string_view key) const {
  const JsonReader r = at(key);
  if (!r.node().is_number_integer()) r.fail("expected integer");
  return r.node().get<long long>();
}

bool JsonReader::boolean(std::string_view key) const {
  const JsonReader r = at(key);
  if (!r.node().is_boolean()) r.fail("expected boolean");
  return r.node().get<bool>();
}

Vec3 JsonReader::as_vec3() const {
  if (!node_.is_array() || node_.size() != 3) fail("expected [x, y, z]");
  double v[3];
  for (std::size_t i = 0; i < 3; ++i) {
    if (!node_[i].is_number()) fail("expected [x, y, z]");
    v[i] = node_[i].get<double>();
  }
  return {v[0], v[1], v[2]};
}

Vec3 JsonReader::vec3(std::string_view key) const { return at(key).as_vec3(); }

std::vector<Vec3> JsonReader::vec3_list(std::string_view key) const {
  const JsonReader list = at(key);
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < list.size(); ++i) out.push_back(list.at(i).as_vec3());
  return out;
}

std::vector<std::string> JsonReader::string_list(std::string_view key) const {
  const JsonReader list = at(key);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < list.size(); ++i) out.push_back(list.at(i).as_string());
  return out;
}

Rgb JsonReader::color(std::string_view key) const {
  const JsonReader r = at(key);
  const auto c = parse_hex(r.as_string());
  if (!c) r.fail("expected color \"#rrggbb\"");
  return *c;
}

void JsonReader::fail(const std::string& what) const {
  throw Error(ErrorCode::SchemaError, (path_.empty() ? std::string("/") : path_) + ": " + what);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path.string() + "'", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + tmp.string() + "'", tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + tmp.string() + "'", tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace incorr
