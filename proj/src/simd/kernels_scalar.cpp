#include <algorithm>
#include <cmath>

#include "incorr/simd.hpp"

namespace incorr::simd {

std::size_t azimuth_bin(double azimuth_deg) {
  double a = std::fmod(azimuth_deg, 360.0);
  if (a < 0.0) a += 360.0;
  if (a >= 360.0) a -= 360.0;
  const auto bin = static_cast<std::size_t>(std::floor(a / 15.0));
  return std::min(bin, kAzimuthBins - 1);
}

double segment_parameter(Vec3 a, Vec3 b, Vec3 p) {
  const Vec3 d = b - a;
  const double den = dot(d, d);
  double t = den > 0.0 ? dot(p - a, d) / den : 0.0;
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  return t;
}

Vec3 closest_point_on_segment(Vec3 a, Vec3 b, Vec3 p) {
  const double t = segment_parameter(a, b, p);
  if (t <= 0.0) return a;
  if (t >= 1.0) return b;
  const Vec3 d = b - a;
  return {a.x + t * d.x, a.y + t * d.y, a.z + t * d.z};
}

namespace {

inline double reduce(const double (&lanes)[4]) { return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]); }

Vec3 sum_scalar(std::span<const Vec3> points) {
  double x[4] = {}, y[4] = {}, z[4] = {};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t lane = i % 4;
    x[lane] += points[i].x;
    y[lane] += points[i].y;
    z[lane] += points[i].z;
  }
  return {reduce(x), reduce(y), reduce(z)};
}

SecondMoments second_moments_scalar(std::span<const Vec3> points, Vec3 pivot) {
  double xx[4] = {}, xy[4] = {}, xz[4] = {}, yy[4] = {}, yz[4] = {}, zz[4] = {};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t lane = i % 4;
    const Vec3 d = points[i] - pivot;
    xx[lane] += d.x * d.x;
    xy[lane] += d.x * d.y;
    xz[lane] += d.x * d.z;
    yy[lane] += d.y * d.y;
    yz[lane] += d.y * d.z;
    zz[lane] += d.z * d.z;
  }
  return {reduce(xx), reduce(xy), reduce(xz), reduce(yy), reduce(yz), reduce(zz)};
}

void plane_distances_scalar(std::span<const Vec3> points, Vec3 origin, Vec3 normal, std::span<double> out) {
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = dot(points[i] - origin, normal);
}

double max_line_distance_sq_scalar(std::span<const Vec3> points, Vec3 origin, Vec3 dir) {
  double best = 0.0;
  for (const Vec3& p : points) {
    const Vec3 d = p - origin;
    const double t = dot(d, dir);
    const Vec3 r{d.x - t * dir.x, d.y - t * dir.y, d.z - t * dir.z};
    best = std::max(best, dot(r, r));
  }
  return best;
}

SegmentHit nearest_segment_scalar(std::span<const Vec3> polyline, Vec3 p) {
  SegmentHit hit{0, INFINITY};
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    const Vec3 q = closest_point_on_segment(polyline[i], polyline[i + 1], p);
    const Vec3 r = p - q;
    const double d2 = dot(r, r);
    if (d2 < hit.distance_sq) hit = {i, d2};
  }
  return hit;
}

void bin_azimuths_scalar(std::span<const double> azimuth_deg, BinCounts& counts) {
  for (double a : azimuth_deg) ++counts[azimuth_bin(a)];
}

}  // namespace

namespace detail {

const KernelTable& scalar_table() {
  static const KernelTable table{
      Isa::scalar,          sum_scalar,
      second_moments_scalar, plane_distances_scalar,
      max_line_distance_sq_scalar, nearest_segment_scalar,
      bin_azimuths_scalar,
  };
  return table;
}

}  // namespace detail
}  // namespace incorr::simd
