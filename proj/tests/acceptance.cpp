// One PASS/FAIL line per acceptance criterion; exits non-zero on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "httplib.h"

#include "incorr/circstats.hpp"
#include "incorr/geom.hpp"
#include "incorr/io.hpp"
#include "incorr/layout.hpp"
#include "incorr/project.hpp"
#include "incorr/render.hpp"
#include "incorr/strata.hpp"
#include "support/hbdq_fixture.hpp"
#include "support/replay.hpp"
#include "support/test_util.hpp"

using namespace incorr;

namespace {

constexpr double kPi = std::numbers::pi;

struct Failure {
  std::string what;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

template <typename T>
std::string str(const T& v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double angular_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

// Upward normal of a plane dipping `dip` degrees toward compass azimuth `az`:
// its horizontal part points down-dip, x east and y north.
Vec3 oracle_normal(double dip, double az) {
  const double d = dip * kPi / 180.0, a = az * kPi / 180.0;
  return {std::sin(d) * std::sin(a), std::sin(d) * std::cos(a), std::cos(d)};
}

// Two unit vectors spanning the plane with normal n.
std::pair<Vec3, Vec3> in_plane_basis(Vec3 n) {
  const Vec3 u = normalized(std::abs(n.z) < 0.9 ? cross(n, {0, 0, 1}) : cross(n, {1, 0, 0}));
  return {u, cross(n, u)};
}

// Point on the plane through the origin with normal n above (x, y).
Vec3 on_plane(Vec3 n, double x, double y) { return {x, y, -(n.x * x + n.y * y) / n.z}; }

std::string plane_fit_recovery() {
  fixture::Rng rng(1001);
  double worst_dip = 0.0, worst_az = 0.0, fit_seconds = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double dip = rng.uniform(0.0, 60.0);
    const double az = rng.uniform(0.0, 360.0);
    const Vec3 n = oracle_normal(dip, az);
    const auto [u, v] = in_plane_basis(n);
    const Vec3 origin{rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(0, 400)};
    std::vector<Vec3> pts;
    for (int i = 0; i < 200; ++i) {
      const Vec3 p = origin + u * rng.uniform(-5.0, 5.0) + v * rng.uniform(-5.0, 5.0);
      pts.push_back(p + Vec3{rng.normal(0, 0.01), rng.normal(0, 0.01), rng.normal(0, 0.01)});
    }
    const auto t0 = std::chrono::steady_clock::now();
    const DipStrike ds = dip_and_strike(fit_plane(pts));
    fit_seconds += seconds_since(t0);

    const double dip_err = std::abs(ds.dip_angle_deg - dip);
    worst_dip = std::max(worst_dip, dip_err);
    expect(dip_err <= 0.5, "trial " + str(trial) + ": dip " + str(ds.dip_angle_deg) + " vs " + str(dip));
    if (dip > 2.0) {
      expect(ds.dip_azimuth_deg.has_value(), "trial " + str(trial) + ": no azimuth at dip " + str(dip));
      const double az_err = angular_gap(*ds.dip_azimuth_deg, az);
      worst_az = std::max(worst_az, az_err);
      expect(az_err <= 1.0, "trial " + str(trial) + ": azimuth " + str(*ds.dip_azimuth_deg) + " vs " + str(az));
    }
  }
  expect(fit_seconds < 1.0, "fitting took " + str(fit_seconds) + " s");
  return "max dip error " + str(worst_dip) + " deg, max azimuth error " + str(worst_az) + " deg, " +
         str(fit_seconds * 1e3) + " ms";
}

// A lower contact on a dipping plane and an upper contact on the same plane
// lifted vertically by the apparent thickness, picked at different places.
std::string true_thickness_oracle() {
  fixture::Rng rng(1002);
  double worst = 0.0;
  for (double dip : {0.0, 10.0, 30.0, 60.0}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Vec3 n = oracle_normal(dip, rng.uniform(0.0, 360.0));
      std::vector<Vec3> bedding;
      for (int i = -3; i <= 3; ++i) {
        for (int j = -3; j <= 3; ++j) bedding.push_back(on_plane(n, 2.0 * i, 2.0 * j));
      }
      const Plane plane = fit_plane(bedding);
      const double apparent = rng.uniform(0.1, 40.0);
      const Vec3 lower = on_plane(n, rng.uniform(-20, 20), rng.uniform(-20, 20));
      const Vec3 upper = on_plane(n, rng.uniform(-20, 20), rng.uniform(-20, 20)) + Vec3{0, 0, apparent};

      const std::vector<ContactPick> picks = {{"a", lower, true_height(plane, lower)},
                                              {"b", upper, true_height(plane, upper)}};
      const StratumTree tree = build_tree(picks, std::map<std::string, int, std::less<>>{{"a", 0}, {"b", 0}});
      const Stratum* interval = find_stratum(tree, stratum_id("a", "b"));
      expect(interval != nullptr, "no a~b interval");
      const double expected = apparent * std::cos(dip * kPi / 180.0);
      const double rel = std::abs((interval->high_m - interval->low_m) - expected) / expected;
      worst = std::max(worst, rel);
      expect(rel <= 1e-9, "dip " + str(dip) + ": thickness " + str(interval->high_m - interval->low_m) + " vs " +
                              str(expected));
    }
  }
  return "max relative error " + str(worst);
}

struct Interval {
  double low, high;
};

bool tiles_real_line(const std::vector<const Stratum*>& strata) {
  std::vector<Interval> iv;
  for (const Stratum* s : strata) iv.push_back({s->low_m, s->high_m});
  std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.low < b.low; });
  if (iv.empty() || iv.front().low != -INFINITY || iv.back().high != INFINITY) return false;
  for (std::size_t i = 0; i + 1 < iv.size(); ++i) {
    if (iv[i].high != iv[i + 1].low || !(iv[i].low < iv[i].high)) return false;
  }
  return true;
}

bool same_structure(const Stratum& a, const Stratum& b) {
  if (a.id != b.id || a.low_m != b.low_m || a.high_m != b.high_m || a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_structure(a.children[i], b.children[i])) return false;
  }
  return true;
}

std::string tree_properties() {
  fixture::Rng rng(1003);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = static_cast<int>(rng.bits() % 48);
    const int max_rank = 1 + static_cast<int>(rng.bits() % 5);
    std::vector<ContactPick> picks;
    std::map<std::string, int, std::less<>> ranks;
    for (int i = 0; i < n; ++i) {
      double h = 0.0;
      do {
        h = rng.uniform(-200.0, 200.0);
      } while (std::any_of(picks.begin(), picks.end(), [&](const ContactPick& p) { return std::abs(p.true_height_m - h) < 1e-3; }));
      const std::string id = "c" + std::to_string(i);
      picks.push_back({id, {0, 0, h}, h});
      ranks[id] = static_cast<int>(rng.bits() % static_cast<std::uint64_t>(max_rank));
    }
    const std::string at = "trial " + str(trial) + ": ";
    const StratumTree tree = build_tree(picks, ranks);
    const auto lv = leaves(tree);
    expect(lv.size() == picks.size() + 1, at + "leaf count " + str(lv.size()));
    expect(tiles_real_line(lv), at + "leaves do not tile the real line");
    for (int level = 0; level <= tree_depth(tree); ++level) {
      expect(tiles_real_line(cut_at_level(tree, level)), at + "cut " + str(level) + " does not tile");
    }

    // Reorder the input; contacts of equal rank are permuted among themselves
    // as well as across ranks.
    std::vector<ContactPick> shuffled = picks;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.bits() % i]);
    expect(same_structure(tree.root, build_tree(shuffled, ranks).root), at + "tree depends on input order");
  }
  return "1000 pick sets";
}

std::string circular_stats() {
  fixture::Rng rng(1004);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::string at = "trial " + str(trial) + ": ";
    const std::size_t n = rng.bits() % 200;
    const double center = rng.uniform(0.0, 360.0);
    const double spread = rng.uniform(1.0, 180.0);
    std::vector<double> az;
    for (std::size_t i = 0; i < n; ++i) {
      az.push_back(i % 9 == 0 ? 15.0 * static_cast<double>(rng.bits() % 24) : center + rng.uniform(-spread, spread));
    }

    const BinCounts bins = bin_azimuths(az);
    expect(std::accumulate(bins.begin(), bins.end(), std::size_t{0}) == n, at + "bin counts do not sum to n");

    const RoseRadii radii = rose_radii(bins, 24.0);
    const std::uint32_t peak = *std::max_element(bins.begin(), bins.end());
    for (std::size_t k = 0; k < kRoseBins; ++k) {
      // Sector area is proportional to r^2, so r^2 / R^2 must equal count / peak.
      const double want = peak == 0 ? 0.0 : static_cast<double>(bins[k]) / peak;
      expect(std::abs(radii[k] * radii[k] / (24.0 * 24.0) - want) <= 1e-12, at + "bin " + str(k) + " area");
    }

    double s = 0.0, c = 0.0;
    for (double a : az) {
      s += std::sin(a * kPi / 180.0);
      c += std::cos(a * kPi / 180.0);
    }
    const double r = std::hypot(s, c);
    if (r < 1e-6) continue;
    const double theta = rng.uniform(-720.0, 720.0);
    std::vector<double> rotated;
    for (double a : az) rotated.push_back(a + theta);
    const auto m0 = mean_azimuth(az);
    const auto m1 = mean_azimuth(rotated);
    expect(m0 && m1, at + "mean missing");
    const double tol = 1e-9 * std::max(1.0, static_cast<double>(n) / r);
    expect(angular_gap(*m1, *m0 + theta) <= tol, at + "mean " + str(*m1) + " vs " + str(*m0 + theta));
  }
  return "1000 azimuth sets";
}

Project checked_in_project() {
  const LoadedProject loaded = load_project(read_file(testutil::data_dir() / "hbdq_project.json"));
  expect(loaded.warnings.empty(), "fixture project loads with warnings");
  return loaded.project;
}

std::string leveling() {
  const Project p = set_leveling(checked_in_project(), std::string("corr1"));
  const PanelLayout layout = compute_layout(p);
  const Correlation& baseline = *p.find_correlation("corr1");
  expect(baseline.contact_refs.size() == 4, "baseline does not span four logs");
  std::vector<double> ys;
  for (const ContactRef& ref : baseline.contact_refs) {
    const LogLayout& log = *layout.find_log(ref.log_id);
    for (const ContactLine& line : log.contacts) {
      if (line.contact_id == ref.contact_id) ys.push_back(line.y);
    }
  }
  expect(ys.size() == 4, "baseline contacts missing from layout");
  const auto path = std::find_if(layout.correlations.begin(), layout.correlations.end(),
                                 [](const CorrelationPath& c) { return c.correlation_id == "corr1"; });
  expect(path != layout.correlations.end() && path->segments.size() == 3, "baseline path");
  for (const CorrelationSegment& seg : path->segments) {
    ys.push_back(seg.y0);
    ys.push_back(seg.y1);
    expect(seg.shape == SegmentShape::straight, "segment " + seg.left_log_id + "-" + seg.right_log_id + " is curved");
  }
  const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
  expect(*hi - *lo <= 1e-9, "baseline ys spread " + str(*hi - *lo) + " px");

  // The other correlation stays curved somewhere, so straightness is not vacuous.
  const auto other = std::find_if(layout.correlations.begin(), layout.correlations.end(),
                                  [](const CorrelationPath& c) { return c.correlation_id != "corr1"; });
  expect(other != layout.correlations.end() &&
             std::any_of(other->segments.begin(), other->segments.end(),
                         [](const CorrelationSegment& s) { return s.shape == SegmentShape::curved; }),
         "second correlation is flat as well");
  return "spread " + str(*hi - *lo) + " px";
}

std::string end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const Project p = checked_in_project();
  const std::string svg = render_project(p);
  const double elapsed = seconds_since(t0);
  expect(elapsed < 1.0, "load and render took " + str(elapsed) + " s");

  expect(p.logs.size() == 4, "logs " + str(p.logs.size()));
  expect(p.dataset.contacts.size() == 62, "contacts " + str(p.dataset.contacts.size()));
  expect(p.dataset.crossbeds.size() == 129, "measurements " + str(p.dataset.crossbeds.size()));
  expect(p.panel.correlations.size() == 2, "correlations " + str(p.panel.correlations.size()));
  std::size_t picks = 0, intervals = 0, typed = 0, bedded = 0, measurements = 0;
  for (const GeoLog& log : p.logs) {
    picks += log.picks.size();
    for (const Stratum* s : leaves(log.tree)) {
      intervals += std::isfinite(s->low_m) && std::isfinite(s->high_m);
      typed += s->rock_type_id.has_value();
      bedded += !s->crossbed_ids.empty();
      measurements += s->crossbed_ids.size();
    }
  }
  expect(picks == 62, "picked contacts " + str(picks));
  expect(intervals == 58, "intervals " + str(intervals));
  expect(typed == 58, "strata with rock types " + str(typed));
  expect(bedded == 18, "strata with cross beds " + str(bedded));
  expect(measurements == 129, "assigned measurements " + str(measurements));

  const auto doc = testutil::parse_xml(svg);
  std::size_t rulers = 0;
  testutil::visit_elements(doc, [&](const std::string& tag, const testutil::Ptree& e) {
    rulers += tag == "g" && testutil::attr(e, "class") == "ruler";
  });
  const std::size_t log_groups = testutil::groups_with_prefix(doc, "log-").size();
  const std::size_t corr_groups = testutil::groups_with_prefix(doc, "correlation-").size();
  expect(log_groups == 4, "log groups " + str(log_groups));
  expect(rulers == 3, "rulers " + str(rulers));
  expect(corr_groups == 2, "correlation groups " + str(corr_groups));

  // Same project built through the HTTP API from the bare dataset.
  const Dataset dataset = load_dataset(read_file(testutil::data_dir() / "hbdq_dataset.json"));
  testutil::LiveServer server(new_project(dataset));
  httplib::Client client("127.0.0.1", server.port());
  fixture::replay_hbdq(client, dataset);
  const auto served = client.Get("/api/panel.svg");
  expect(served && served->status == 200, "GET /api/panel.svg failed");

  testutil::TempDir dir;
  const auto out = dir.path() / "panel.svg";
  const auto run = testutil::run_command(testutil::cli_path() + " build-panel '" +
                                         (testutil::data_dir() / "hbdq_project.json").string() + "' -o '" + out.string() +
                                         "' --level corr1");
  expect(run.exit_code == 0, "build-panel exited " + str(run.exit_code) + ": " + run.output);
  expect(read_file(out) == served->body, "CLI and service SVGs differ");
  return str(svg.size()) + " bytes in " + str(elapsed * 1e3) + " ms";
}

std::string determinism() {
  const bool update = std::getenv("INCORR_UPDATE_GOLDEN") != nullptr;
  const Project hbdq = checked_in_project();
  const Project small = fixture::small_project();
  const std::vector<std::pair<std::string, Project>> cases = {
      {"hbdq_panel.svg", hbdq},
      {"hbdq_leveled.svg", set_leveling(hbdq, std::string("corr1"))},
      {"small.svg", small},
  };
  testutil::TempDir dir;
  for (const auto& [name, project] : cases) {
    const std::string first = render_project(project);
    const std::string second = render_project(load_project(save_project(project)).project);
    expect(first == second, name + " differs between runs");

    // A fresh process renders the saved project.
    const auto saved = dir.path() / (name + ".json");
    const auto out = dir.path() / name;
    write_file_atomic(saved, save_project(project));
    const auto run = testutil::run_command(testutil::cli_path() + " build-panel '" + saved.string() + "' -o '" + out.string() + "'");
    expect(run.exit_code == 0, name + ": build-panel exited " + str(run.exit_code));
    expect(read_file(out) == first, name + " differs in a separate process");

    const auto golden = testutil::golden_dir() / name;
    if (update) write_file_atomic(golden, first);
    expect(std::filesystem::exists(golden), name + " has no golden file");
    expect(read_file(golden) == first, name + " differs from its golden file");
  }
  return update ? "golden files rewritten" : str(cases.size()) + " golden files";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
      {"plane-fit recovery", plane_fit_recovery},
      {"true-thickness oracle", true_thickness_oracle},
      {"tree properties", tree_properties},
      {"circular statistics", circular_stats},
      {"leveling", leveling},
      {"hbdq end-to-end", end_to_end},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    try {
      const std::string detail = check();
      std::cout << "PASS " << name << " (" << detail << ")\n";
    } catch (const Failure& f) {
      ++failures;
      std::cout << "FAIL " << name << ": " << f.what << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL " << name << ": exception: " << e.what() << "\n";
    }
  }
  return failures == 0 ? 0 : 1;
}
