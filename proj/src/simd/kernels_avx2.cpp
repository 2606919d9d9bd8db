// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
// FP contraction is disabled project-wide so no FMA is fused here.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "incorr/simd.hpp"

namespace incorr::simd {
namespace {

const __m256i kStride3 = _mm256_set_epi64x(9, 6, 3, 0);

struct Lanes3 {
  __m256d x, y, z;
};

inline Lanes3 gather3(const Vec3* p) {
  const double* base = &p->x;
  return {_mm256_i64gather_pd(base, kStride3, 8), _mm256_i64gather_pd(base + 1, kStride3, 8),
          _mm256_i64gather_pd(base + 2, kStride3, 8)};
}

inline __m256d dot3(__m256d ax, __m256d ay, __m256d az, __m256d bx, __m256d by, __m256d bz) {
  return _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(ax, bx), _mm256_mul_pd(ay, by)), _mm256_mul_pd(az, bz));
}

inline double reduce(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

Vec3 sum_avx2(std::span<const Vec3> points) {
  __m256d sx = _mm256_setzero_pd(), sy = sx, sz = sx;
  const std::size_t n = points.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const Lanes3 p = gather3(&points[i]);
    sx = _mm256_add_pd(sx, p.x);
    sy = _mm256_add_pd(sy, p.y);
    sz = _mm256_add_pd(sz, p.z);
  }
  alignas(32) double x[4], y[4], z[4];
  _mm256_store_pd(x, sx);
  _mm256_store_pd(y, sy);
  _mm256_store_pd(z, sz);
  for (std::size_t lane = 0; i < n; ++i, ++lane) {
    x[lane] += points[i].x;
    y[lane] += points[i].y;
    z[lane] += points[i].z;
  }
  return {(x[0] + x[1]) + (x[2] + x[3]), (y[0] + y[1]) + (y[2] + y[3]), (z[0] + z[1]) + (z[2] + z[3])};
}

SecondMoments second_moments_avx2(std::span<const Vec3> points, Vec3 pivot) {
  const __m256d px = _mm256_set1_pd(pivot.x), py = _mm256_set1_pd(pivot.y), pz = _mm256_set1_pd(pivot.z);
  __m256d xx = _mm256_setzero_pd(), xy = xx, xz = xx, yy = xx, yz = xx, zz = xx;
  const std::size_t n = points.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const Lanes3 p = gather3(&points[i]);
    const __m256d dx = _mm256_sub_pd(p.x, px), dy = _mm256_sub_pd(p.y, py), dz = _mm256_sub_pd(p.z, pz);
    xx = _mm256_add_pd(xx, _mm256_mul_pd(dx, dx));
    xy = _mm256_add_pd(xy, _mm256_mul_pd(dx, dy));
    xz = _mm256_add_pd(xz, _mm256_mul_pd(dx, dz));
    yy = _mm256_add_pd(yy, _mm256_mul_pd(dy, dy));
    yz = _mm256_add_pd(yz, _mm256_mul_pd(dy, dz));
    zz = _mm256_add_pd(zz, _mm256_mul_pd(dz, dz));
  }
  alignas(32) double a[6][4];
  _mm256_store_pd(a[0], xx);
  _mm256_store_pd(a[1], xy);
  _mm256_store_pd(a[2], xz);
  _mm256_store_pd(a[3], yy);
  _mm256_store_pd(a[4], yz);
  _mm256_store_pd(a[5], zz);
  for (std::size_t lane = 0; i < n; ++i, ++lane) {
    const Vec3 d = points[i] - pivot;
    a[0][lane] += d.x * d.x;
    a[1][lane] += d.x * d.y;
    a[2][lane] += d.x * d.z;
    a[3][lane] += d.y * d.y;
    a[4][lane] += d.y * d.z;
    a[5][lane] += d.z * d.z;
  }
  auto r = [&](int k) { return (a[k][0] + a[k][1]) + (a[k][2] + a[k][3]); };
  return {r(0), r(1), r(2), r(3), r(4), r(5)};
}

void plane_distances_avx2(std::span<const Vec3> points, Vec3 origin, Vec3 normal, std::span<double> out) {
  const __m256d ox = _mm256_set1_pd(origin.x), oy = _mm256_set1_pd(origin.y), oz = _mm256_set1_pd(origin.z);
  const __m256d nx = _mm256_set1_pd(normal.x), ny = _mm256_set1_pd(normal.y), nz = _mm256_set1_pd(normal.z);
  const std::size_t n = points.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const Lanes3 p = gather3(&points[i]);
    const __m256d h =
        dot3(_mm256_sub_pd(p.x, ox), _mm256_sub_pd(p.y, oy), _mm256_sub_pd(p.z, oz), nx, ny, nz);
    _mm256_storeu_pd(&out[i], h);
  }
  for (; i < n; ++i) out[i] = dot(points[i] - origin, normal);
}

double max_line_distance_sq_avx2(std::span<const Vec3> points, Vec3 origin, Vec3 dir) {
  const __m256d ox = _mm256_set1_pd(origin.x), oy = _mm256_set1_pd(origin.y), oz = _mm256_set1_pd(origin.z);
  const __m256d ux = _mm256_set1_pd(dir.x), uy = _mm256_set1_pd(dir.y), uz = _mm256_set1_pd(dir.z);
  __m256d best = _mm256_setzero_pd();
  const std::size_t n = points.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const Lanes3 p = gather3(&points[i]);
    const __m256d dx = _mm256_sub_pd(p.x, ox), dy = _mm256_sub_pd(p.y, oy), dz = _mm256_sub_pd(p.z, oz);
    const __m256d t = dot3(dx, dy, dz, ux, uy, uz);
    const __m256d rx = _mm256_sub_pd(dx, _mm256_mul_pd(t, ux));
    const __m256d ry = _mm256_sub_pd(dy, _mm256_mul_pd(t, uy));
    const __m256d rz = _mm256_sub_pd(dz, _mm256_mul_pd(t, uz));
    best = _mm256_max_pd(best, dot3(rx, ry, rz, rx, ry, rz));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double result = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) {
    const Vec3 d = points[i] - origin;
    const double t = dot(d, dir);
    const Vec3 r{d.x - t * dir.x, d.y - t * dir.y, d.z - t * dir.z};
    result = std::max(result, dot(r, r));
  }
  return result;
}

SegmentHit nearest_segment_avx2(std::span<const Vec3> polyline, Vec3 p) {
  SegmentHit hit{0, INFINITY};
  if (polyline.size() < 2) return hit;
  const std::size_t segments = polyline.size() - 1;
  const __m256d px = _mm256_set1_pd(p.x), py = _mm256_set1_pd(p.y), pz = _mm256_set1_pd(p.z);
  const __m256d zero = _mm256_setzero_pd(), one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= segments; i += 4) {
    const Lanes3 a = gather3(&polyline[i]);
    const Lanes3 b = gather3(&polyline[i + 1]);
    const __m256d dx = _mm256_sub_pd(b.x, a.x), dy = _mm256_sub_pd(b.y, a.y), dz = _mm256_sub_pd(b.z, a.z);
    const __m256d den = dot3(dx, dy, dz, dx, dy, dz);
    const __m256d num = dot3(_mm256_sub_pd(px, a.x), _mm256_sub_pd(py, a.y), _mm256_sub_pd(pz, a.z), dx, dy, dz);
    __m256d t = _mm256_blendv_pd(zero, _mm256_div_pd(num, den), _mm256_cmp_pd(den, zero, _CMP_GT_OQ));
    t = _mm256_min_pd(_mm256_max_pd(t, zero), one);
    __m256d qx = _mm256_add_pd(a.x, _mm256_mul_pd(t, dx));
    __m256d qy = _mm256_add_pd(a.y, _mm256_mul_pd(t, dy));
    __m256d qz = _mm256_add_pd(a.z, _mm256_mul_pd(t, dz));
    const __m256d at_start = _mm256_cmp_pd(t, zero, _CMP_LE_OQ);
    const __m256d at_end = _mm256_cmp_pd(t, one, _CMP_GE_OQ);
    qx = _mm256_blendv_pd(_mm256_blendv_pd(qx, b.x, at_end), a.x, at_start);
    qy = _mm256_blendv_pd(_mm256_blendv_pd(qy, b.y, at_end), a.y, at_start);
    qz = _mm256_blendv_pd(_mm256_blendv_pd(qz, b.z, at_end), a.z, at_start);
    const __m256d rx = _mm256_sub_pd(px, qx), ry = _mm256_sub_pd(py, qy), rz = _mm256_sub_pd(pz, qz);
    alignas(32) double d2[4];
    _mm256_store_pd(d2, dot3(rx, ry, rz, rx, ry, rz));
    for (std::size_t lane = 0; lane < 4; ++lane) {
      if (d2[lane] < hit.distance_sq) hit = {i + lane, d2[lane]};
    }
  }
  for (; i < segments; ++i) {
    const Vec3 r = p - closest_point_on_segment(polyline[i], polyline[i + 1], p);
    const double d2 = dot(r, r);
    if (d2 < hit.distance_sq) hit = {i, d2};
  }
  return hit;
}

void bin_azimuths_avx2(std::span<const double> azimuth_deg, BinCounts& counts) {
  const __m256d lo = _mm256_setzero_pd(), hi = _mm256_set1_pd(360.0), width = _mm256_set1_pd(15.0);
  const std::size_t n = azimuth_deg.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(&azimuth_deg[i]);
    const __m256d in_range =
        _mm256_and_pd(_mm256_cmp_pd(a, lo, _CMP_GE_OQ), _mm256_cmp_pd(a, hi, _CMP_LT_OQ));
    if (_mm256_movemask_pd(in_range) != 0xF) {
      for (std::size_t k = 0; k < 4; ++k) ++counts[azimuth_bin(azimuth_deg[i + k])];
      continue;
    }
    alignas(16) std::int32_t bins[4];
    _mm_store_si128(reinterpret_cast<__m128i*>(bins),
                    _mm256_cvttpd_epi32(_mm256_floor_pd(_mm256_div_pd(a, width))));
    for (std::int32_t b : bins) ++counts[std::min<std::size_t>(static_cast<std::size_t>(b), kAzimuthBins - 1)];
  }
  for (; i < n; ++i) ++counts[azimuth_bin(azimuth_deg[i])];
}

}  // namespace

namespace detail {

const KernelTable& avx2_table() {
  static const KernelTable table{
      Isa::avx2,           sum_avx2,
      second_moments_avx2, plane_distances_avx2,
      max_line_distance_sq_avx2, nearest_segment_avx2,
      bin_azimuths_avx2,
  };
  return table;
}

}  // namespace detail
}  // namespace incorr::simd
