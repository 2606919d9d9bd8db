#pragma once

#include <optional>
#include <span>
#include <vector>

#include "incorr/vec3.hpp"

namespace incorr {

// Total-least-squares plane: origin is the centroid of the fitted points and
// the unit normal points upward (z >= 0; ties broken toward +y, then +x).
struct Plane {
  Vec3 origin;
  Vec3 normal{0.0, 0.0, 1.0};
  double rms_residual_m = 0.0;
};

// Azimuths are compass degrees (0 = north = +y, 90 = east = +x) and are
// absent for planes flatter than kHorizontalDipDeg.
struct DipStrike {
  double dip_angle_deg = 0.0;
  std::optional<double> dip_azimuth_deg;
  std::optional<double> strike_azimuth_deg;
};

inline constexpr double kHorizontalDipDeg = 0.5;
inline constexpr double kCollinearTolerance = 1e-9;

// Throws Error(TooFewPoints) below three points and Error(DegenerateGeometry)
// when the points are collinear or coincident.
Plane fit_plane(std::span<const Vec3> points);

DipStrike dip_and_strike(const Plane& plane);

// Signed height above the plane, measured along its normal.
double true_height(const Plane& plane, Vec3 point);

std::vector<double> true_heights(const Plane& plane, std::span<const Vec3> points);

double horizontal_distance(Vec3 a, Vec3 b);

// Wraps any finite angle into [0, 360).
double wrap_degrees(double deg);

double to_radians(double deg);
double to_degrees(double rad);

// Upward unit normal of a plane dipping `dip_deg` toward `dip_azimuth_deg`.
Vec3 normal_from_dip(double dip_deg, double dip_azimuth_deg);

struct PolylineProjection {
  Vec3 point;
  double distance_m = 0.0;
};

// Nearest point on a polyline with at least two vertices.
PolylineProjection project_onto_polyline(std::span<const Vec3> polyline, Vec3 p);

}  // namespace incorr
