#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"

#include "incorr/simd.hpp"
#include "support/hbdq_fixture.hpp"

using incorr::Vec3;
namespace simd = incorr::simd;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_bits(Vec3 a, Vec3 b) { return same_bits(a.x, b.x) && same_bits(a.y, b.y) && same_bits(a.z, b.z); }

std::vector<Vec3> random_points(fixture::Rng& rng, std::size_t n, double offset) {
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back({offset + rng.uniform(-50.0, 50.0), -offset + rng.uniform(-50.0, 50.0), rng.uniform(-5.0, 5.0)});
  }
  return pts;
}

}  // namespace

TEST_CASE("scalar kernels match a long double reference") {
  fixture::Rng rng(7);
  const auto& k = simd::detail::scalar_table();
  for (std::size_t n : {1u, 3u, 4u, 5u, 17u, 200u}) {
    const auto pts = random_points(rng, n, 1000.0);
    long double sx = 0, sy = 0, sz = 0;
    for (const Vec3& p : pts) sx += p.x, sy += p.y, sz += p.z;
    const Vec3 s = k.sum(pts);
    CHECK(s.x == doctest::Approx(static_cast<double>(sx)).epsilon(1e-12));
    CHECK(s.y == doctest::Approx(static_cast<double>(sy)).epsilon(1e-12));
    CHECK(s.z == doctest::Approx(static_cast<double>(sz)).epsilon(1e-12));

    const Vec3 pivot = pts[0];
    long double xy = 0, zz = 0;
    for (const Vec3& p : pts) {
      xy += static_cast<long double>(p.x - pivot.x) * (p.y - pivot.y);
      zz += static_cast<long double>(p.z - pivot.z) * (p.z - pivot.z);
    }
    const simd::SecondMoments m = k.second_moments(pts, pivot);
    CHECK(m.xy == doctest::Approx(static_cast<double>(xy)).epsilon(1e-10));
    CHECK(m.zz == doctest::Approx(static_cast<double>(zz)).epsilon(1e-10));
  }
}

TEST_CASE("azimuth_bin puts boundaries in the upper bin and wraps") {
  CHECK(simd::azimuth_bin(0.0) == 0);
  CHECK(simd::azimuth_bin(14.999) == 0);
  CHECK(simd::azimuth_bin(15.0) == 1);
  CHECK(simd::azimuth_bin(359.999) == 23);
  CHECK(simd::azimuth_bin(360.0) == 0);
  CHECK(simd::azimuth_bin(-15.0) == 23);
  CHECK(simd::azimuth_bin(-0.0) == 0);
  CHECK(simd::azimuth_bin(735.0) == 1);
}

TEST_CASE("closest_point_on_segment returns endpoints exactly when clamped") {
  const Vec3 a{1.0, 2.0, 3.0}, b{4.0, 6.0, 3.0};
  CHECK(simd::closest_point_on_segment(a, b, {-10.0, -10.0, 0.0}) == a);
  CHECK(simd::closest_point_on_segment(a, b, {10.0, 20.0, 0.0}) == b);
  const Vec3 mid = simd::closest_point_on_segment(a, b, {2.5, 4.0, 9.0});
  CHECK(mid.x == doctest::Approx(2.5));
  CHECK(mid.y == doctest::Approx(4.0));
  CHECK(simd::closest_point_on_segment(a, a, {0.0, 0.0, 0.0}) == a);
}

TEST_CASE("dispatch honours INCORR_SIMD and reports support") {
  CHECK(simd::isa_supported(simd::Isa::scalar));
  CHECK(simd::kernels_for(simd::Isa::scalar).isa == simd::Isa::scalar);
  CHECK(simd::to_string(simd::Isa::avx2) == "avx2");
}

#if defined(__x86_64__)
TEST_CASE("avx2 kernels are bit-identical to the scalar reference") {
  if (!simd::isa_supported(simd::Isa::avx2)) {
    MESSAGE("CPU lacks AVX2; equivalence not exercised");
    return;
  }
  const auto& s = simd::kernels_for(simd::Isa::scalar);
  const auto& v = simd::kernels_for(simd::Isa::avx2);
  fixture::Rng rng(11);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = static_cast<std::size_t>(trial % 67) + (trial % 3 == 0 ? 0 : 2);
    const double offset = trial % 2 ? 1.0e5 : 0.0;
    const auto pts = random_points(rng, n, offset);
    CAPTURE(n);

    REQUIRE(same_bits(s.sum(pts), v.sum(pts)));

    const Vec3 pivot = pts.empty() ? Vec3{} : pts[n / 2];
    const simd::SecondMoments ms = s.second_moments(pts, pivot), mv = v.second_moments(pts, pivot);
    REQUIRE(same_bits(ms.xx, mv.xx));
    REQUIRE(same_bits(ms.xy, mv.xy));
    REQUIRE(same_bits(ms.xz, mv.xz));
    REQUIRE(same_bits(ms.yy, mv.yy));
    REQUIRE(same_bits(ms.yz, mv.yz));
    REQUIRE(same_bits(ms.zz, mv.zz));

    const Vec3 normal = incorr::normalized({rng.uniform(-1, 1), rng.uniform(-1, 1), 1.0});
    std::vector<double> ds(n), dv(n);
    s.plane_distances(pts, pivot, normal, ds);
    v.plane_distances(pts, pivot, normal, dv);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(same_bits(ds[i], dv[i]));

    const Vec3 dir = incorr::normalized({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    REQUIRE(same_bits(s.max_line_distance_sq(pts, pivot, dir), v.max_line_distance_sq(pts, pivot, dir)));

    if (n >= 2) {
      const Vec3 q{offset + rng.uniform(-60, 60), -offset + rng.uniform(-60, 60), rng.uniform(-6, 6)};
      const simd::SegmentHit hs = s.nearest_segment(pts, q), hv = v.nearest_segment(pts, q);
      REQUIRE(hs.segment == hv.segment);
      REQUIRE(same_bits(hs.distance_sq, hv.distance_sq));
    }

    std::vector<double> az;
    for (std::size_t i = 0; i < n; ++i) {
      switch (i % 5) {
        case 0: az.push_back(rng.uniform(0.0, 360.0)); break;
        case 1: az.push_back(15.0 * static_cast<double>(rng.bits() % 24)); break;
        case 2: az.push_back(rng.uniform(-720.0, 720.0)); break;
        case 3: az.push_back(360.0); break;
        default: az.push_back(std::nextafter(360.0, 0.0)); break;
      }
    }
    simd::BinCounts bs{}, bv{};
    s.bin_azimuths(az, bs);
    v.bin_azimuths(az, bv);
    REQUIRE(bs == bv);
  }
}

TEST_CASE("nearest_segment ties resolve to the lower index in both variants") {
  if (!simd::isa_supported(simd::Isa::avx2)) return;
  // Symmetric zig-zag: the query is equidistant from several segments.
  std::vector<Vec3> line;
  for (int i = 0; i < 9; ++i) line.push_back({static_cast<double>(i), i % 2 ? 1.0 : -1.0, 0.0});
  const Vec3 q{4.0, 5.0, 0.0};
  const auto hs = simd::kernels_for(simd::Isa::scalar).nearest_segment(line, q);
  const auto hv = simd::kernels_for(simd::Isa::avx2).nearest_segment(line, q);
  CHECK(hs.segment == hv.segment);
  CHECK(same_bits(hs.distance_sq, hv.distance_sq));
}
#endif
