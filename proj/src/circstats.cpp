#include "incorr/circstats.hpp"

#include <algorithm>
#include <cmath>

#include "incorr/error.hpp"
#include "incorr/geom.hpp"

namespace incorr {

namespace {
constexpr double kMinResultant = 1e-9;
}

BinCounts bin_azimuths(std::span<const double> azimuth_deg) {
  BinCounts counts{};
  simd::kernels().bin_azimuths(azimuth_deg, counts);
  return counts;
}

std::optional<double> mean_azimuth(std::span<const double> azimuth_deg) {
  double s = 0.0, c = 0.0;
  for (double a : azimuth_deg) {
    s += std::sin(to_radians(a));
    c += std::cos(to_radians(a));
  }
  if (azimuth_deg.empty() || std::hypot(s, c) < kMinResultant) return std::nullopt;
  return wrap_degrees(to_degrees(std::atan2(s, c)));
}

RoseRadii rose_radii(const BinCounts& counts, double max_radius_px) {
  if (!(max_radius_px > 0.0)) throw Error(ErrorCode::InvalidArgument, "rose radius must be positive");
  RoseRadii radii{};
  const std::uint32_t peak = *std::max_element(counts.begin(), counts.end());
  if (peak == 0) return radii;
  for (std::size_t k = 0; k < kRoseBins; ++k) {
    radii[k] = max_radius_px * std::sqrt(static_cast<double>(counts[k]) / static_cast<double>(peak));
  }
  return radii;
}

RoseDiagram make_rose(std::span<const double> azimuth_deg) {
  RoseDiagram rose;
  rose.bin_counts = bin_azimuths(azimuth_deg);
  rose.mean_azimuth_deg = mean_azimuth(azimuth_deg);
  for (std::uint32_t c : rose.bin_counts) rose.total += c;
  return rose;
}

}  // namespace incorr
