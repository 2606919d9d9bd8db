#pragma once

#include <array>
#include <optional>
#include <span>

#include "incorr/simd.hpp"

namespace incorr {

inline constexpr std::size_t kRoseBins = simd::kAzimuthBins;
inline constexpr double kRoseBinWidthDeg = 15.0;

using BinCounts = simd::BinCounts;
using RoseRadii = std::array<double, kRoseBins>;

struct RoseDiagram {
  BinCounts bin_counts{};
  std::optional<double> mean_azimuth_deg;
  std::uint32_t total = 0;
};

// Bin k covers [15k, 15(k+1)) degrees; values are taken mod 360.
BinCounts bin_azimuths(std::span<const double> azimuth_deg);

// Circular mean via the resultant vector; empty when the resultant vanishes.
std::optional<double> mean_azimuth(std::span<const double> azimuth_deg);

// Area-proportional radii: r_k = max_radius * sqrt(count_k / max_count).
RoseRadii rose_radii(const BinCounts& counts, double max_radius_px);

RoseDiagram make_rose(std::span<const double> azimuth_deg);

}  // namespace incorr
