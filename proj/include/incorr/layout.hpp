#pragma once

// Panel geometry as plain data. Coordinates are pixels with y growing upward
// (geologic sense); the SVG writer flips them.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "incorr/circstats.hpp"
#include "incorr/model.hpp"

namespace incorr {

// Narrowest drawn rectangle, as a fraction of the primary column width.
inline constexpr double kMinGrainWidth = 0.05;
// Endpoint ys closer than this are drawn as a straight connection.
inline constexpr double kLevelTolerancePx = 1e-9;

struct RectPx {
  double x = 0.0;
  double y = 0.0;  // bottom edge
  double w = 0.0;
  double h = 0.0;
};

struct StratumBox {
  std::string stratum_id;
  RectPx rect;
  std::optional<std::string> rock_type_id;
  Rgb fill{255, 255, 255};
  bool uncertain = false;
};

struct ContactLine {
  std::string contact_id;
  double x0 = 0.0, x1 = 0.0, y = 0.0;
  Rgb color;
  double weight = 1.0;
  bool dashed = false;
};

struct RosePlacement {
  std::string stratum_id;
  double cx = 0.0, cy = 0.0;
  double max_radius = 0.0;
  RoseDiagram rose;
  RoseRadii radii{};
};

struct LogLayout {
  std::string log_id;
  std::string name;
  double x_origin_px = 0.0;
  double y_offset_px = 0.0;
  double secondary_x = 0.0, secondary_w = 0.0;
  double primary_x = 0.0, primary_w = 0.0;
  double y_bottom = 0.0, y_top = 0.0;
  std::vector<StratumBox> primary;    // leaves, bottom to top
  std::vector<StratumBox> secondary;  // tree cut at the secondary level
  std::vector<ContactLine> contacts;  // ascending y
  std::vector<RosePlacement> roses;

  double center_x() const { return secondary_x + 0.5 * (primary_x + primary_w - secondary_x); }
};

struct Ruler {
  std::string left_log_id, right_log_id;
  double distance_m = 0.0;
  double x0 = 0.0, x1 = 0.0, y = 0.0;
  double label_x = 0.0, label_y = 0.0;
};

enum class SegmentShape { straight, curved };

struct CorrelationSegment {
  std::string left_log_id, right_log_id;
  std::string left_contact_id, right_contact_id;
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  bool dashed = true;
  SegmentShape shape = SegmentShape::straight;
};

struct CorrelationPath {
  std::string correlation_id;
  Rgb color;
  std::vector<CorrelationSegment> segments;
};

struct PanelLayout {
  std::vector<LogLayout> logs;  // in panel order
  std::vector<Ruler> rulers;
  std::vector<CorrelationPath> correlations;
  double width = 0.0;
  double y_min = 0.0, y_max = 0.0;
  double name_y = 0.0;

  const LogLayout* find_log(std::string_view id) const;
};

// Horizontal extent of a rock type's rectangle, 0 for phi_max and 1 for phi_min.
double grain_width(const RockType& rock, const PanelStyle& style);

// Vertical offset per entry of panel.log_order. Unleveled, a contact lands at
// px_per_meter * (anchor elevation + true height). Leveled, every log in the
// baseline correlation is shifted so its baseline contact lands on the mean of
// those default positions; other logs keep the default.
std::vector<double> compute_offsets(const Panel& panel, std::span<const GeoLog> logs);

// Throws Error(NotAPermutation) unless new_order permutes panel.log_order.
Panel reorder_logs(const Panel& panel, std::span<const std::string> new_order);

// Horizontal distance between reference-plane origins of adjacent logs.
std::vector<double> ruler_distances(const Panel& panel, std::span<const GeoLog> logs);

// One segment per pair of neighbouring logs (in panel order) that both take
// part in a correlation; non-neighbouring participants are not connected.
std::vector<CorrelationPath> correlation_paths(const Panel& panel, const PanelLayout& layout);

PanelLayout compute_layout(const Project& project);

}  // namespace incorr
