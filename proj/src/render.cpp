#include "incorr/render.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "incorr/error.hpp"
#include "incorr/geom.hpp"
#include "incorr/simd.hpp"

namespace incorr {

std::string format_px(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

namespace {

class SvgWriter {
 public:
  explicit SvgWriter(const PanelLayout& layout) : top_(layout.y_max) {}

  std::string x(double v) const { return format_px(v); }
  std::string y(double v) const { return format_px(top_ - v); }

  std::ostringstream& out() { return out_; }
  std::string str() const { return out_.str(); }

  void line(double x0, double y0, double x1, double y1, Rgb color, double width, bool dashed,
            const std::string& extra = {}) {
    out_ << "<line x1=\"" << x(x0) << "\" y1=\"" << y(y0) << "\" x2=\"" << x(x1) << "\" y2=\"" << y(y1)
         << "\" stroke=\"" << to_hex(color) << "\" stroke-width=\"" << format_px(width) << "\"";
    if (dashed) out_ << " stroke-dasharray=\"" << kDashPattern << "\"";
    out_ << extra << "/>\n";
  }

 private:
  double top_;
  std::ostringstream out_;
};

constexpr Rgb kBlack{0, 0, 0};
constexpr Rgb kOutline{0x44, 0x44, 0x44};
constexpr Rgb kRed{0xd0, 0x10, 0x10};

void write_log(SvgWriter& w, const LogLayout& log, double name_y) {
  auto& o = w.out();
  const std::string log_attr = " data-log=\"" + xml_escape(log.log_id) + "\"";
  o << "<g id=\"log-" << xml_escape(log.log_id) << "\"" << log_attr << ">\n";
  o << "<text x=\"" << w.x(log.center_x()) << "\" y=\"" << w.y(name_y)
    << "\" text-anchor=\"middle\" class=\"log-name\">" << xml_escape(log.name) << "</text>\n";
  for (const StratumBox& b : log.primary) {
    o << "<rect x=\"" << w.x(b.rect.x) << "\" y=\"" << w.y(b.rect.y + b.rect.h) << "\" width=\"" << format_px(b.rect.w)
      << "\" height=\"" << format_px(b.rect.h) << "\" fill=\"" << to_hex(b.fill) << "\" stroke=\"none\""
      << log_attr << " data-stratum=\"" << xml_escape(b.stratum_id) << "\"";
    if (b.rock_type_id) o << " data-rock-type=\"" << xml_escape(*b.rock_type_id) << "\"";
    o << "/>\n";
  }
  for (const StratumBox& b : log.primary) {
    const double right = b.rect.x + b.rect.w;
    w.line(right, b.rect.y, right, b.rect.y + b.rect.h, kOutline, 1.0, b.uncertain,
           " class=\"grain-border\" data-stratum=\"" + xml_escape(b.stratum_id) + "\"");
  }
  w.line(log.primary_x, log.y_bottom, log.primary_x, log.y_top, kBlack, 1.0, false, " class=\"log-axis\"");
  for (const ContactLine& c : log.contacts) {
    w.line(c.x0, c.y, c.x1, c.y, c.color, c.weight, c.dashed,
           " class=\"contact\"" + log_attr + " data-contact=\"" + xml_escape(c.contact_id) + "\"");
  }
  o << "</g>\n";

  o << "<g id=\"secondary-" << xml_escape(log.log_id) << "\"" << log_attr << ">\n";
  for (const StratumBox& b : log.secondary) {
    o << "<rect x=\"" << w.x(b.rect.x) << "\" y=\"" << w.y(b.rect.y + b.rect.h) << "\" width=\"" << format_px(b.rect.w)
      << "\" height=\"" << format_px(b.rect.h) << "\" fill=\"" << to_hex(b.fill) << "\" stroke=\""
      << to_hex(kOutline) << "\" stroke-width=\"0.50\"" << log_attr << " data-stratum=\""
      << xml_escape(b.stratum_id) << "\"/>\n";
  }
  o << "</g>\n";

  for (std::size_t k = 0; k < log.roses.size(); ++k) {
    const RosePlacement& r = log.roses[k];
    o << "<g id=\"rose-" << xml_escape(log.log_id) << "-" << k << "\"" << log_attr << " data-stratum=\""
      << xml_escape(r.stratum_id) << "\" data-count=\"" << r.rose.total << "\">\n";
    o << "<circle cx=\"" << w.x(r.cx) << "\" cy=\"" << w.y(r.cy) << "\" r=\"" << format_px(r.max_radius)
      << "\" fill=\"none\" stroke=\"#999999\" stroke-width=\"0.50\"/>\n";
    for (std::size_t bin = 0; bin < kRoseBins; ++bin) {
      const double radius = r.radii[bin];
      if (r.rose.bin_counts[bin] == 0) continue;
      const double a0 = to_radians(kRoseBinWidthDeg * static_cast<double>(bin));
      const double a1 = to_radians(kRoseBinWidthDeg * static_cast<double>(bin + 1));
      o << "<path d=\"M " << w.x(r.cx) << " " << w.y(r.cy) << " L " << w.x(r.cx + radius * std::sin(a0)) << " "
        << w.y(r.cy + radius * std::cos(a0)) << " A " << format_px(radius) << " " << format_px(radius) << " 0 0 1 "
        << w.x(r.cx + radius * std::sin(a1)) << " " << w.y(r.cy + radius * std::cos(a1))
        << " Z\" fill=\"#808080\" fill-opacity=\"0.5\" stroke=\"none\" data-bin=\"" << bin << "\"/>\n";
    }
    if (r.rose.mean_azimuth_deg) {
      const double a = to_radians(*r.rose.mean_azimuth_deg);
      w.line(r.cx, r.cy, r.cx + r.max_radius * std::sin(a), r.cy + r.max_radius * std::cos(a), kRed, 1.5, false,
             " class=\"rose-mean\"");
    }
    o << "</g>\n";
  }
}

}  // namespace

std::string render_panel(const PanelLayout& layout) {
  SvgWriter w(layout);
  auto& o = w.out();
  const double height = layout.y_max - layout.y_min;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << format_px(layout.width)
    << "\" height=\"" << format_px(height) << "\" viewBox=\"0 0 " << format_px(layout.width) << " "
    << format_px(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect id=\"frame\" x=\"0\" y=\"0\" width=\"" << format_px(layout.width) << "\" height=\"" << format_px(height)
    << "\" fill=\"#ffffff\"/>\n";

  for (const LogLayout& log : layout.logs) write_log(w, log, layout.name_y);

  if (!layout.rulers.empty()) {
    o << "<g id=\"rulers\">\n";
    for (const Ruler& r : layout.rulers) {
      o << "<g class=\"ruler\" data-left-log=\"" << xml_escape(r.left_log_id) << "\" data-right-log=\""
        << xml_escape(r.right_log_id) << "\">\n";
      w.line(r.x0, r.y, r.x1, r.y, kBlack, 1.0, false);
      w.line(r.x0, r.y - 4.0, r.x0, r.y + 4.0, kBlack, 1.0, false);
      w.line(r.x1, r.y - 4.0, r.x1, r.y + 4.0, kBlack, 1.0, false);
      o << "<text x=\"" << w.x(r.label_x) << "\" y=\"" << w.y(r.label_y)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << std::lround(r.distance_m) << " m</text>\n";
      o << "</g>\n";
    }
    o << "</g>\n";
  }

  for (const CorrelationPath& c : layout.correlations) {
    o << "<g id=\"correlation-" << xml_escape(c.correlation_id) << "\" data-correlation=\""
      << xml_escape(c.correlation_id) << "\">\n";
    for (const CorrelationSegment& s : c.segments) {
      o << "<path d=\"M " << w.x(s.x0) << " " << w.y(s.y0);
      if (s.shape == SegmentShape::straight) {
        o << " L " << w.x(s.x1) << " " << w.y(s.y1);
      } else {
        const double xm = 0.5 * (s.x0 + s.x1);
        o << " C " << w.x(xm) << " " << w.y(s.y0) << " " << w.x(xm) << " " << w.y(s.y1) << " " << w.x(s.x1) << " "
          << w.y(s.y1);
      }
      o << "\" fill=\"none\" stroke=\"" << to_hex(c.color) << "\" stroke-width=\"1.50\"";
      if (s.dashed) o << " stroke-dasharray=\"" << kDashPattern << "\"";
      o << " data-correlation=\"" << xml_escape(c.correlation_id) << "\" data-left-log=\""
        << xml_escape(s.left_log_id) << "\" data-right-log=\"" << xml_escape(s.right_log_id) << "\" data-shape=\""
        << (s.shape == SegmentShape::straight ? "straight" : "curved") << "\"/>\n";
    }
    o << "</g>\n";
  }
  o << "</svg>\n";
  return w.str();
}

std::string render_project(const Project& project) { return render_panel(compute_layout(project)); }

OutcropStrip project_outcrop_strip(std::span<const Contact> contacts) {
  std::vector<Vec3> flat;
  for (const Contact& c : contacts) {
    for (const Vec3& p : c.points) flat.push_back({p.x, p.y, 0.0});
  }
  if (flat.empty()) throw Error(ErrorCode::TooFewPoints, "outcrop strip needs at least one contact point");

  const auto& k = simd::kernels();
  const double n = static_cast<double>(flat.size());
  const Vec3 s = k.sum(flat);
  const Vec3 centroid{s.x / n, s.y / n, 0.0};
  const simd::SecondMoments m = k.second_moments(flat, centroid);
  if (m.xx + m.yy == 0.0) {
    throw Error(ErrorCode::DegenerateGeometry, "all contact points coincide horizontally");
  }
  const double theta = 0.5 * std::atan2(2.0 * m.xy, m.xx - m.yy);
  double ax = std::cos(theta), ay = std::sin(theta);
  constexpr double kAxisSnap = 1e-12;
  if (std::abs(ax) < kAxisSnap) ax = 0.0;
  if (std::abs(ay) < kAxisSnap) ay = 0.0;
  if (ax < 0.0 || (ax == 0.0 && ay < 0.0)) {
    ax = -ax;
    ay = -ay;
  }
  if (ax == 0.0) ay = 1.0;
  if (ay == 0.0) ax = 1.0;

  OutcropStrip strip;
  strip.axis_x = ax;
  strip.axis_y = ay;
  strip.s_min = INFINITY;
  strip.s_max = -INFINITY;
  for (const Contact& c : contacts) {
    StripPolyline pl{c.id, {}};
    for (const Vec3& p : c.points) {
      const double sp = p.x * ax + p.y * ay;
      strip.s_min = std::min(strip.s_min, sp);
      strip.s_max = std::max(strip.s_max, sp);
      pl.points.push_back({sp, p.z});
    }
    strip.polylines.push_back(std::move(pl));
  }
  return strip;
}

}  // namespace incorr
