#include "incorr/layout.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "incorr/error.hpp"
#include "incorr/geom.hpp"
#include "incorr/strata.hpp"

namespace incorr {

namespace {

constexpr double kMarginPx = 40.0;
constexpr double kColumnGapPx = 6.0;
constexpr double kRosePadPx = 8.0;
constexpr double kNameOffsetPx = 14.0;
constexpr double kRulerOffsetPx = 34.0;
constexpr double kHeaderPx = 50.0;
constexpr double kFooterPx = 20.0;

const GeoLog& log_by_id(std::span<const GeoLog> logs, std::string_view id) {
  const auto it = std::find_if(logs.begin(), logs.end(), [&](const GeoLog& l) { return l.id == id; });
  if (it == logs.end()) throw Error(ErrorCode::UnknownLog, "unknown log '" + std::string(id) + "'", std::string(id));
  return *it;
}

const ContactPick* find_pick(const GeoLog& log, std::string_view contact_id) {
  const auto it = std::find_if(log.picks.begin(), log.picks.end(),
                               [&](const ContactPick& p) { return p.contact_id == contact_id; });
  return it == log.picks.end() ? nullptr : &*it;
}

const ContactRef* ref_for_log(const Correlation& c, std::string_view log_id) {
  const auto it = std::find_if(c.contact_refs.begin(), c.contact_refs.end(),
                               [&](const ContactRef& r) { return r.log_id == log_id; });
  return it == c.contact_refs.end() ? nullptr : &*it;
}

bool segment_dashed(const Correlation& c, std::string_view a, std::string_view b) {
  for (std::size_t k = 0; k + 1 < c.contact_refs.size(); ++k) {
    const auto& l = c.contact_refs[k].log_id;
    const auto& r = c.contact_refs[k + 1].log_id;
    if ((l == a && r == b) || (l == b && r == a)) {
      return k < c.segment_uncertain.size() ? c.segment_uncertain[k] : true;
    }
  }
  // Pairs that only became neighbours after reordering have no recorded style.
  return true;
}

double column_pitch(const PanelStyle& st) {
  return st.secondary_width_px + kColumnGapPx + st.primary_width_px + 2.0 * (st.rose_max_radius_px + kRosePadPx) +
         st.log_gap_px;
}

double clipped(double h, const ClipRange& clip) { return std::clamp(h, clip.low_m, clip.high_m); }

const RockType* rock_by_id(const Panel& panel, const std::optional<std::string>& id) {
  if (!id) return nullptr;
  const auto it = std::find_if(panel.rock_catalog.begin(), panel.rock_catalog.end(),
                               [&](const RockType& r) { return r.id == *id; });
  if (it == panel.rock_catalog.end()) throw Error(ErrorCode::UnknownRockType, "unknown rock type '" + *id + "'", *id);
  return &*it;
}

}  // namespace

const LogLayout* PanelLayout::find_log(std::string_view id) const {
  const auto it = std::find_if(logs.begin(), logs.end(), [&](const LogLayout& l) { return l.log_id == id; });
  return it == logs.end() ? nullptr : &*it;
}

double grain_width(const RockType& rock, const PanelStyle& style) {
  if (!(style.phi_min < style.phi_max)) throw Error(ErrorCode::InvalidArgument, "phi_min must be < phi_max");
  return std::clamp((style.phi_max - rock.phi) / (style.phi_max - style.phi_min), 0.0, 1.0);
}

std::vector<double> compute_offsets(const Panel& panel, std::span<const GeoLog> logs) {
  const double scale = panel.style.px_per_meter;
  std::vector<double> offsets;
  offsets.reserve(panel.log_order.size());
  for (const std::string& id : panel.log_order) offsets.push_back(scale * log_by_id(logs, id).anchor_elevation_m);
  if (!panel.leveling) return offsets;

  const auto cit = std::find_if(panel.correlations.begin(), panel.correlations.end(),
                                [&](const Correlation& c) { return c.id == *panel.leveling; });
  if (cit == panel.correlations.end()) {
    throw Error(ErrorCode::UnknownCorrelation, "unknown correlation '" + *panel.leveling + "'", *panel.leveling);
  }

  struct Member {
    std::size_t slot;
    double height_m;
  };
  std::vector<Member> members;
  double sum = 0.0;
  for (const ContactRef& ref : cit->contact_refs) {
    const auto pos = std::find(panel.log_order.begin(), panel.log_order.end(), ref.log_id);
    if (pos == panel.log_order.end()) continue;
    const auto slot = static_cast<std::size_t>(pos - panel.log_order.begin());
    const ContactPick* pick = find_pick(log_by_id(logs, ref.log_id), ref.contact_id);
    if (pick == nullptr) {
      throw Error(ErrorCode::DanglingReference,
                  "contact '" + ref.contact_id + "' is not picked in log '" + ref.log_id + "'", cit->id);
    }
    members.push_back({slot, pick->true_height_m});
    sum += offsets[slot] + scale * pick->true_height_m;
  }
  if (members.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "leveling correlation must span at least 2 logs of the panel", cit->id);
  }
  const double baseline = sum / static_cast<double>(members.size());
  for (const Member& m : members) offsets[m.slot] = baseline - scale * m.height_m;
  return offsets;
}

Panel reorder_logs(const Panel& panel, std::span<const std::string> new_order) {
  std::multiset<std::string> a(panel.log_order.begin(), panel.log_order.end());
  std::multiset<std::string> b(new_order.begin(), new_order.end());
  if (a != b) throw Error(ErrorCode::NotAPermutation, "new log order is not a permutation of the current one");
  Panel out = panel;
  out.log_order.assign(new_order.begin(), new_order.end());
  return out;
}

std::vector<double> ruler_distances(const Panel& panel, std::span<const GeoLog> logs) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < panel.log_order.size(); ++i) {
    out.push_back(horizontal_distance(log_by_id(logs, panel.log_order[i]).reference_plane.origin,
                                      log_by_id(logs, panel.log_order[i + 1]).reference_plane.origin));
  }
  return out;
}

std::vector<CorrelationPath> correlation_paths(const Panel& panel, const PanelLayout& layout) {
  std::vector<CorrelationPath> out;
  for (const Correlation& c : panel.correlations) {
    CorrelationPath path{c.id, c.color, {}};
    for (std::size_t i = 0; i + 1 < layout.logs.size(); ++i) {
      const LogLayout& left = layout.logs[i];
      const LogLayout& right = layout.logs[i + 1];
      const ContactRef* lref = ref_for_log(c, left.log_id);
      const ContactRef* rref = ref_for_log(c, right.log_id);
      if (lref == nullptr || rref == nullptr) continue;

      auto line_y = [](const LogLayout& l, const std::string& contact_id) {
        const auto it = std::find_if(l.contacts.begin(), l.contacts.end(),
                                     [&](const ContactLine& cl) { return cl.contact_id == contact_id; });
        if (it == l.contacts.end()) {
          throw Error(ErrorCode::DanglingReference,
                      "contact '" + contact_id + "' is not picked in log '" + l.log_id + "'", contact_id);
        }
        return it->y;
      };
      CorrelationSegment seg;
      seg.left_log_id = left.log_id;
      seg.right_log_id = right.log_id;
      seg.left_contact_id = lref->contact_id;
      seg.right_contact_id = rref->contact_id;
      seg.x0 = left.primary_x + left.primary_w;
      seg.y0 = line_y(left, lref->contact_id);
      seg.x1 = right.secondary_x;
      seg.y1 = line_y(right, rref->contact_id);
      seg.dashed = segment_dashed(c, left.log_id, right.log_id);
      seg.shape = std::abs(seg.y0 - seg.y1) <= kLevelTolerancePx ? SegmentShape::straight : SegmentShape::curved;
      path.segments.push_back(std::move(seg));
    }
    out.push_back(std::move(path));
  }
  return out;
}

PanelLayout compute_layout(const Project& project) {
  const Panel& panel = project.panel;
  const PanelStyle& st = panel.style;
  const double scale = st.px_per_meter;
  const std::vector<double> offsets = compute_offsets(panel, project.logs);

  PanelLayout layout;
  double content_top = -INFINITY, content_bottom = INFINITY;
  for (std::size_t i = 0; i < panel.log_order.size(); ++i) {
    const GeoLog& log = log_by_id(project.logs, panel.log_order[i]);
    LogLayout ll;
    ll.log_id = log.id;
    ll.name = log.name;
    ll.x_origin_px = kMarginPx + static_cast<double>(i) * column_pitch(st);
    ll.y_offset_px = offsets[i];
    ll.secondary_x = ll.x_origin_px;
    ll.secondary_w = st.secondary_width_px;
    ll.primary_x = ll.secondary_x + st.secondary_width_px + kColumnGapPx;
    ll.primary_w = st.primary_width_px;

    const ClipRange clip = clip_range(log.picks);
    auto to_y = [&](double h) { return ll.y_offset_px + scale * clipped(h, clip); };
    ll.y_bottom = to_y(clip.low_m);
    ll.y_top = to_y(clip.high_m);

    auto boxes = [&](const std::vector<const Stratum*>& strata, double x, double full_w, bool by_grain) {
      std::vector<StratumBox> out;
      for (const Stratum* s : strata) {
        const double y0 = to_y(s->low_m);
        const double y1 = to_y(s->high_m);
        StratumBox box;
        box.stratum_id = s->id;
        box.rock_type_id = s->rock_type_id;
        box.uncertain = s->rock_type_uncertain;
        double w = full_w;
        if (const RockType* rock = rock_by_id(panel, s->rock_type_id)) {
          box.fill = rock->color;
          if (by_grain) w = full_w * std::max(grain_width(*rock, st), kMinGrainWidth);
        } else if (!by_grain && !s->is_leaf()) {
          box.fill = Rgb{0xee, 0xee, 0xee};
        }
        box.rect = RectPx{x, y0, w, y1 - y0};
        out.push_back(std::move(box));
      }
      return out;
    };
    ll.primary = boxes(leaves(log.tree), ll.primary_x, ll.primary_w, true);
    ll.secondary = boxes(cut_at_level(log.tree, st.secondary_log_level), ll.secondary_x, ll.secondary_w, false);

    for (const ContactPick& p : log.picks) {
      const Contact* c = project.dataset.find_contact(p.contact_id);
      if (c == nullptr) {
        throw Error(ErrorCode::DanglingReference, "unknown contact '" + p.contact_id + "'", p.contact_id);
      }
      ll.contacts.push_back({c->id, ll.secondary_x, ll.primary_x + ll.primary_w, to_y(p.true_height_m), c->color,
                             c->line_weight, c->uncertain});
    }

    double log_top = ll.y_top, log_bottom = ll.y_bottom;
    for (const Stratum* s : cut_at_level(log.tree, st.secondary_log_level)) {
      const std::vector<double> az = aggregate_azimuths(log.tree, s->id, project.dataset);
      if (az.empty()) continue;
      RosePlacement rp;
      rp.stratum_id = s->id;
      rp.cx = ll.primary_x + ll.primary_w + kRosePadPx + st.rose_max_radius_px;
      rp.cy = 0.5 * (to_y(s->low_m) + to_y(s->high_m));
      rp.max_radius = st.rose_max_radius_px;
      rp.rose = make_rose(az);
      rp.radii = rose_radii(rp.rose.bin_counts, st.rose_max_radius_px);
      log_top = std::max(log_top, rp.cy + rp.max_radius);
      log_bottom = std::min(log_bottom, rp.cy - rp.max_radius);
      ll.roses.push_back(std::move(rp));
    }
    content_top = std::max(content_top, log_top);
    content_bottom = std::min(content_bottom, log_bottom);
    layout.logs.push_back(std::move(ll));
  }

  if (layout.logs.empty()) {
    content_top = 0.0;
    content_bottom = 0.0;
  }
  layout.name_y = content_top + kNameOffsetPx;
  layout.y_max = content_top + kHeaderPx;
  layout.y_min = content_bottom - kFooterPx;
  const double columns = static_cast<double>(layout.logs.size());
  layout.width = layout.logs.empty() ? 2.0 * kMarginPx
                                     : 2.0 * kMarginPx + columns * column_pitch(st) - st.log_gap_px;

  const std::vector<double> distances = ruler_distances(panel, project.logs);
  for (std::size_t i = 0; i + 1 < layout.logs.size(); ++i) {
    Ruler r;
    r.left_log_id = layout.logs[i].log_id;
    r.right_log_id = layout.logs[i + 1].log_id;
    r.distance_m = distances[i];
    r.x0 = layout.logs[i].center_x();
    r.x1 = layout.logs[i + 1].center_x();
    r.y = content_top + kRulerOffsetPx;
    r.label_x = 0.5 * (r.x0 + r.x1);
    r.label_y = r.y + 4.0;
    layout.rulers.push_back(std::move(r));
  }
  layout.correlations = correlation_paths(panel, layout);
  return layout;
}

}  // namespace incorr
