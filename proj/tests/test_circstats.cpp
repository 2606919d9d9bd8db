#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "incorr/circstats.hpp"
#include "incorr/error.hpp"
#include "incorr/geom.hpp"
#include "support/hbdq_fixture.hpp"

using namespace incorr;

namespace {

double angular_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

double resultant(const std::vector<double>& az) {
  double s = 0, c = 0;
  for (double a : az) {
    s += std::sin(to_radians(a));
    c += std::cos(to_radians(a));
  }
  return std::hypot(s, c);
}

}  // namespace

TEST_CASE("bin_azimuths examples") {
  BinCounts expect{};
  expect[0] = 3;
  CHECK(bin_azimuths(std::vector<double>{0, 0, 0}) == expect);

  expect = {};
  expect[1] = 1;
  CHECK(bin_azimuths(std::vector<double>{15.0}) == expect);

  expect = {};
  expect[23] = 1;
  expect[0] = 1;
  CHECK(bin_azimuths(std::vector<double>{359.9, 361.0}) == expect);
}

TEST_CASE("mean_azimuth examples") {
  CHECK(*mean_azimuth(std::vector<double>{90, 90, 90}) == doctest::Approx(90.0));
  CHECK(angular_gap(*mean_azimuth(std::vector<double>{350, 10}), 0.0) < 1e-9);
  CHECK_FALSE(mean_azimuth(std::vector<double>{0, 180}).has_value());
  CHECK_FALSE(mean_azimuth(std::vector<double>{}).has_value());
  CHECK_FALSE(mean_azimuth(std::vector<double>{0, 120, 240}).has_value());
}

TEST_CASE("rose_radii examples") {
  BinCounts c{};
  c[0] = 4;
  c[5] = 1;
  const RoseRadii r = rose_radii(c, 24.0);
  CHECK(r[0] == 24.0);
  CHECK(r[5] == doctest::Approx(12.0));

  const RoseRadii zero = rose_radii(BinCounts{}, 24.0);
  for (double v : zero) CHECK(v == 0.0);

  BinCounts nine{};
  nine[0] = 9;
  nine[1] = 1;
  const RoseRadii r30 = rose_radii(nine, 30.0);
  CHECK(r30[0] == 30.0);
  CHECK(r30[1] == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(r30[2] == 0.0);
  CHECK(r30[1] * r30[1] / (r30[0] * r30[0]) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));

  CHECK_THROWS_AS(rose_radii(c, 0.0), Error);
}

TEST_CASE("make_rose totals") {
  const RoseDiagram rose = make_rose(std::vector<double>{10, 20, 30, 200});
  CHECK(rose.total == 4);
  CHECK(std::accumulate(rose.bin_counts.begin(), rose.bin_counts.end(), 0u) == 4);
  REQUIRE(rose.mean_azimuth_deg.has_value());
}

TEST_CASE("circular statistics fuzz") {
  fixture::Rng rng(360);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = rng.bits() % 150;
    std::vector<double> az;
    const double center = rng.uniform(0.0, 360.0);
    const double spread = rng.uniform(1.0, 180.0);
    for (std::size_t i = 0; i < n; ++i) {
      double a = center + rng.uniform(-spread, spread);
      if (i % 11 == 0) a = 15.0 * static_cast<double>(rng.bits() % 48) - 360.0;
      az.push_back(a);
    }
    CAPTURE(trial);

    // Conservation, and agreement with a direct floor-based count.
    const BinCounts bins = bin_azimuths(az);
    REQUIRE(std::accumulate(bins.begin(), bins.end(), std::size_t{0}) == n);
    BinCounts direct{};
    for (double a : az) {
      double w = std::fmod(a, 360.0);
      if (w < 0) w += 360.0;
      if (w >= 360.0) w = 0.0;
      ++direct[static_cast<std::size_t>(std::floor(w / 15.0))];
    }
    REQUIRE(bins == direct);

    // Area proportionality for every pair of non-empty bins.
    const RoseRadii radii = rose_radii(bins, 24.0);
    for (std::size_t k = 0; k < kRoseBins; ++k) {
      if (bins[k] == 0) {
        REQUIRE(radii[k] == 0.0);
        continue;
      }
      for (std::size_t j = 0; j < kRoseBins; ++j) {
        if (bins[j] == 0) continue;
        const double lhs = radii[k] * radii[k] / (radii[j] * radii[j]);
        const double rhs = static_cast<double>(bins[k]) / bins[j];
        REQUIRE(std::abs(lhs - rhs) <= 1e-12 * rhs);
      }
    }

    // Rotation equivariance. Rounding in the resultant grows as it shrinks,
    // so the tolerance scales with n / |R|.
    const double theta = rng.uniform(-720.0, 720.0);
    std::vector<double> rotated;
    for (double a : az) rotated.push_back(a + theta);
    const auto m0 = mean_azimuth(az);
    const auto m1 = mean_azimuth(rotated);
    const double r = resultant(az);
    if (r < 1e-6) continue;
    REQUIRE(m0.has_value());
    REQUIRE(m1.has_value());
    const double tol = 1e-9 * std::max(1.0, static_cast<double>(n) / r);
    REQUIRE(angular_gap(*m1, wrap_degrees(*m0 + theta)) <= tol);
  }
}
