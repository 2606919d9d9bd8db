#pragma once

// Data-parallel inner loops behind geom and circstats.
//
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The reference kernels accumulate in four interleaved lanes
// (element i goes to lane i % 4) and reduce the lanes as (l0 + l1) + (l2 + l3),
// which is exactly what the vector code does. The two variants therefore agree
// bit for bit, and results do not depend on the CPU the program runs on.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "incorr/vec3.hpp"

namespace incorr::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

// Raw second moments of (p - pivot) over a point set.
struct SecondMoments {
  double xx = 0.0, xy = 0.0, xz = 0.0, yy = 0.0, yz = 0.0, zz = 0.0;
};

struct SegmentHit {
  std::size_t segment = 0;  // index of the segment's first vertex
  double distance_sq = 0.0;
};

inline constexpr std::size_t kAzimuthBins = 24;
using BinCounts = std::array<std::uint32_t, kAzimuthBins>;

struct KernelTable {
  Isa isa;
  // Component-wise sum of all points.
  Vec3 (*sum)(std::span<const Vec3> points);
  SecondMoments (*second_moments)(std::span<const Vec3> points, Vec3 pivot);
  // out[i] = dot(points[i] - origin, normal); out.size() == points.size().
  void (*plane_distances)(std::span<const Vec3> points, Vec3 origin, Vec3 normal, std::span<double> out);
  // max_i |(p_i - origin) - ((p_i - origin) . dir) dir|^2 for a unit direction.
  double (*max_line_distance_sq)(std::span<const Vec3> points, Vec3 origin, Vec3 dir);
  // Nearest segment of a polyline (>= 2 vertices) to p; ties go to the lower index.
  SegmentHit (*nearest_segment)(std::span<const Vec3> polyline, Vec3 p);
  // Adds 15-degree bin counts of azimuths (any finite value, taken mod 360).
  void (*bin_azimuths)(std::span<const double> azimuth_deg, BinCounts& counts);
};

bool isa_supported(Isa isa);

// Kernels for an explicit ISA; throws Error(InvalidArgument) if unsupported.
const KernelTable& kernels_for(Isa isa);

// Kernels selected at first use: AVX2 when the CPU has it, unless the
// INCORR_SIMD environment variable is set to "scalar".
const KernelTable& kernels();

// Shared by every variant so that tails and the vector lanes agree.
std::size_t azimuth_bin(double azimuth_deg);

// Clamped segment parameter of the point on [a, b] nearest to p.
double segment_parameter(Vec3 a, Vec3 b, Vec3 p);

// Nearest point on [a, b]; returns the endpoints exactly when clamped.
Vec3 closest_point_on_segment(Vec3 a, Vec3 b, Vec3 p);

namespace detail {
const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace incorr::simd
