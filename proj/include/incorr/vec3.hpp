#pragma once

#include <cmath>

namespace incorr {

// Position or direction in the local ENU frame: x = east, y = north, z = up, meters.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return s * a; }
  friend constexpr bool operator==(Vec3 a, Vec3 b) = default;
};

// Evaluated strictly left to right; the SIMD kernels reproduce this order.
constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(Vec3 a) { return (1.0 / norm(a)) * a; }

static_assert(sizeof(Vec3) == 3 * sizeof(double), "Vec3 must be tightly packed for the SIMD kernels");

}  // namespace incorr
