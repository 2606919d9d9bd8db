#include "incorr/geom.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "incorr/error.hpp"
#include "incorr/simd.hpp"

namespace incorr {

double to_radians(double deg) { return deg * (std::numbers::pi / 180.0); }
double to_degrees(double rad) { return rad * (180.0 / std::numbers::pi); }

double wrap_degrees(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a < 0.0) a += 360.0;
  if (a >= 360.0) a -= 360.0;
  return a;
}

Plane fit_plane(std::span<const Vec3> points) {
  if (points.size() < 3) {
    throw Error(ErrorCode::TooFewPoints, "plane fit needs at least 3 points, got " + std::to_string(points.size()));
  }
  const auto& k = simd::kernels();
  const double n = static_cast<double>(points.size());
  const Vec3 s = k.sum(points);
  const Vec3 centroid{s.x / n, s.y / n, s.z / n};

  const simd::SecondMoments m = k.second_moments(points, centroid);
  Eigen::Matrix3d cov;
  cov << m.xx, m.xy, m.xz,
         m.xy, m.yy, m.yz,
         m.xz, m.yz, m.zz;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);

  // Eigenvalues ascend: column 0 is the normal, column 2 the principal axis.
  const Eigen::Vector3d e0 = eig.eigenvectors().col(0);
  const Eigen::Vector3d e2 = eig.eigenvectors().col(2);
  const Vec3 principal = normalized(Vec3{e2.x(), e2.y(), e2.z()});

  const double extent_sq = k.max_line_distance_sq(points, centroid, Vec3{});
  const double off_line_sq = k.max_line_distance_sq(points, centroid, principal);
  if (extent_sq == 0.0 || off_line_sq <= kCollinearTolerance * kCollinearTolerance * extent_sq) {
    throw Error(ErrorCode::DegenerateGeometry, "plane fit points are collinear or coincident");
  }

  Vec3 normal = normalized(Vec3{e0.x(), e0.y(), e0.z()});
  const bool flip = normal.z < 0.0 || (normal.z == 0.0 && (normal.y < 0.0 || (normal.y == 0.0 && normal.x < 0.0)));
  if (flip) normal = -1.0 * normal;

  std::vector<double> residuals(points.size());
  k.plane_distances(points, centroid, normal, residuals);
  double ss = 0.0;
  for (double r : residuals) ss += r * r;

  return Plane{centroid, normal, std::sqrt(ss / n)};
}

DipStrike dip_and_strike(const Plane& plane) {
  const Vec3 nrm = plane.normal;
  const double horizontal = std::hypot(nrm.x, nrm.y);
  DipStrike ds;
  ds.dip_angle_deg = to_degrees(std::atan2(horizontal, nrm.z));
  if (ds.dip_angle_deg < kHorizontalDipDeg) return ds;
  // Projecting straight-down onto the plane gives nz * (nx, ny) horizontally,
  // so for an upward normal the steepest descent points along (nx, ny).
  const double azimuth = wrap_degrees(to_degrees(std::atan2(nrm.x, nrm.y)));
  ds.dip_azimuth_deg = azimuth;
  ds.strike_azimuth_deg = wrap_degrees(azimuth - 90.0);
  return ds;
}

double true_height(const Plane& plane, Vec3 point) { return dot(point - plane.origin, plane.normal); }

std::vector<double> true_heights(const Plane& plane, std::span<const Vec3> points) {
  std::vector<double> out(points.size());
  simd::kernels().plane_distances(points, plane.origin, plane.normal, out);
  return out;
}

double horizontal_distance(Vec3 a, Vec3 b) { return std::hypot(a.x - b.x, a.y - b.y); }

Vec3 normal_from_dip(double dip_deg, double dip_azimuth_deg) {
  const double dip = to_radians(dip_deg);
  const double az = to_radians(dip_azimuth_deg);
  return {std::sin(dip) * std::sin(az), std::sin(dip) * std::cos(az), std::cos(dip)};
}

PolylineProjection project_onto_polyline(std::span<const Vec3> polyline, Vec3 p) {
  if (polyline.size() < 2) {
    throw Error(ErrorCode::TooFewPoints, "polyline needs at least 2 vertices");
  }
  const simd::SegmentHit hit = simd::kernels().nearest_segment(polyline, p);
  return {simd::closest_point_on_segment(polyline[hit.segment], polyline[hit.segment + 1], p),
          std::sqrt(hit.distance_sq)};
}

}  // namespace incorr
