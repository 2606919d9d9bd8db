#pragma once

#include <span>
#include <string>
#include <vector>

#include "incorr/layout.hpp"
#include "incorr/model.hpp"

namespace incorr {

inline constexpr const char* kDashPattern = "6,4";

// Standalone SVG 1.1 (rect, path, line, circle, text, g only). Output is a
// pure function of the layout: equal layouts give byte-identical documents.
// Interactive elements carry data-log / data-stratum / data-contact /
// data-correlation attributes with the model ids.
std::string render_panel(const PanelLayout& layout);

std::string render_project(const Project& project);

// Fixed two-decimal formatting used for every SVG coordinate.
std::string format_px(double v);

std::string xml_escape(std::string_view text);

struct StripPoint {
  double s = 0.0;  // position along the outcrop's principal horizontal axis, m
  double z = 0.0;  // elevation, m
};

struct StripPolyline {
  std::string contact_id;
  std::vector<StripPoint> points;
};

// Unrolls the outcrop into a 2D strip: s is the projection of (x, y) onto the
// principal horizontal direction of all contact points, oriented toward +x
// (toward +y when the axis is north-south).
struct OutcropStrip {
  double axis_x = 1.0, axis_y = 0.0;
  double s_min = 0.0, s_max = 0.0;
  std::vector<StripPolyline> polylines;
};

OutcropStrip project_outcrop_strip(std::span<const Contact> contacts);

}  // namespace incorr
