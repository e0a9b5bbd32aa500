#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "relpair/config.hpp"
#include "relpair/errors.hpp"
#include "relpair/scenario.hpp"
#include "relpair/text.hpp"

// Spacetime diagram renderer. One uniform world-to-pixel scale keeps photon
// worldlines at 45 degrees on screen. Every coordinate is written with two
// decimals, so identical inputs give identical bytes. Event markers carry
// data-event / data-beta attributes; tests re-parse those instead of eyeballs.

namespace relpair {

namespace diagram_detail {

struct Mapper {
  AxisRange axis;
  double width;
  double height;
  double scale;

  static Mapper fit(const AxisRange& axis, double width, double height, double margin) {
    const double sx = (width - 2.0 * margin) / (axis.x_max - axis.x_min);
    const double sy = (height - 2.0 * margin) / (axis.ct_max - axis.ct_min);
    return {axis, width, height, std::min(sx, sy)};
  }

  double px(double x) const {
    return 0.5 * width + (x - 0.5 * (axis.x_min + axis.x_max)) * scale;
  }
  double py(double ct) const {
    return 0.5 * height - (ct - 0.5 * (axis.ct_min + axis.ct_max)) * scale;
  }
  bool contains(const Event& e) const {
    return e.x >= axis.x_min && e.x <= axis.x_max && e.ct >= axis.ct_min && e.ct <= axis.ct_max;
  }
};

/// Clip the parametric line p + t (dx, dct), t in [t_lo, t_hi], to the axis
/// box. Returns world endpoints, or nothing if the line misses the box.
inline std::optional<std::pair<Event, Event>> clip_line(const Event& p, double dx, double dct,
                                                        const AxisRange& box,
                                                        double t_lo = -1e18,
                                                        double t_hi = 1e18) {
  const double bounds[4][2] = {{dx, box.x_min - p.x},
                               {-dx, p.x - box.x_max},
                               {dct, box.ct_min - p.ct},
                               {-dct, p.ct - box.ct_max}};
  for (const auto& [num, rhs] : bounds) {
    // Constraint: num * t >= rhs.
    if (num == 0.0) {
      if (rhs > 0.0) return std::nullopt;
      continue;
    }
    if (num > 0.0)
      t_lo = std::max(t_lo, rhs / num);
    else
      t_hi = std::min(t_hi, rhs / num);
  }
  if (t_lo >= t_hi) return std::nullopt;
  return std::make_pair(Event(p.x + t_lo * dx, p.ct + t_lo * dct),
                        Event(p.x + t_hi * dx, p.ct + t_hi * dct));
}

inline void emit_line(std::ostringstream& svg, const Mapper& map, const Event& a, const Event& b,
                      const std::string& attrs) {
  svg << "  <line x1=\"" << format_fixed(map.px(a.x), 2) << "\" y1=\""
      << format_fixed(map.py(a.ct), 2) << "\" x2=\"" << format_fixed(map.px(b.x), 2)
      << "\" y2=\"" << format_fixed(map.py(b.ct), 2) << "\" " << attrs << "/>\n";
}

inline void emit_clipped(std::ostringstream& svg, const Mapper& map, const Event& p, double dx,
                         double dct, const std::string& attrs, double t_lo = -1e18,
                         double t_hi = 1e18) {
  if (const auto seg = clip_line(p, dx, dct, map.axis, t_lo, t_hi))
    emit_line(svg, map, seg->first, seg->second, attrs);
}

inline void emit_tick(std::ostringstream& svg, const Mapper& map, const Event& at,
                      const std::string& color) {
  if (!map.contains(at)) return;
  svg << "  <circle class=\"tick\" cx=\"" << format_fixed(map.px(at.x), 2) << "\" cy=\""
      << format_fixed(map.py(at.ct), 2) << "\" r=\"2.50\" fill=\"" << color << "\"/>\n";
}

inline void emit_marker(std::ostringstream& svg, const Mapper& map, const Event& at,
                        const std::string& name, const std::string& beta_attr,
                        const std::string& text) {
  svg << "  <circle class=\"event\" data-event=\"" << name << "\"" << beta_attr << " cx=\""
      << format_fixed(map.px(at.x), 2) << "\" cy=\"" << format_fixed(map.py(at.ct), 2)
      << "\" r=\"4.00\" fill=\"#111111\"/>\n";
  svg << "  <text x=\"" << format_fixed(map.px(at.x) + 7.0, 2) << "\" y=\""
      << format_fixed(map.py(at.ct) - 7.0, 2) << "\" font-size=\"14\">" << text << "</text>\n";
}

inline const char* frame_color(std::size_t index) {
  static const char* kPalette[6] = {"#1668b4", "#c22f2f", "#2a8f3c",
                                    "#8656bd", "#b0801f", "#3aa0a8"};
  return kPalette[index % 6];
}

}  // namespace diagram_detail

/// Labeled points requested for the diagram, resolved from the located
/// events. a and f produce one marker per overlay frame.
inline std::vector<std::tuple<std::string, double, Event>> diagram_markers(
    const LocatedEvents& ev, const std::vector<std::string>& names) {
  std::vector<std::tuple<std::string, double, Event>> out;
  for (const std::string& name : names) {
    if (name == "d") {
      out.emplace_back("d", 0.0, ev.d);
    } else if (name == "b") {
      out.emplace_back("b", 0.0, ev.b);
    } else if (name == "a") {
      for (const FrameEvents& fr : ev.frames) out.emplace_back("a", fr.beta, fr.a);
    } else if (name == "f") {
      for (const FrameEvents& fr : ev.frames) out.emplace_back("f", fr.beta, fr.f);
    } else if (name == "e") {
      if (!ev.e)
        throw ConfigError("diagram event e requested but no second detector is configured");
      out.emplace_back("e", 0.0, *ev.e);
    } else {
      throw ConfigError("unknown diagram event name: " + name);
    }
  }
  return out;
}

inline std::string render_diagram(const Scenario& sc, const LocatedEvents& ev,
                                  const DiagramConfig& dg,
                                  const std::vector<std::string>& event_names) {
  using namespace diagram_detail;

  const auto markers = diagram_markers(ev, event_names);

  AxisRange axis;
  if (dg.axis) {
    axis = *dg.axis;
    for (const auto& [name, beta, at] : markers) {
      if (!(at.x >= axis.x_min && at.x <= axis.x_max && at.ct >= axis.ct_min &&
            at.ct <= axis.ct_max))
        throw ConfigError("event " + name + " at (" + format_double(at.x) + ", " +
                          format_double(at.ct) + ") lies outside the diagram axis range");
    }
  } else {
    // Fit around the origin, the source, and every labeled event.
    double x_lo = std::min(0.0, sc.source.x), x_hi = std::max(0.0, sc.source.x);
    double ct_lo = 0.0, ct_hi = 0.0;
    for (const auto& [name, beta, at] : markers) {
      x_lo = std::min(x_lo, at.x);
      x_hi = std::max(x_hi, at.x);
      ct_lo = std::min(ct_lo, at.ct);
      ct_hi = std::max(ct_hi, at.ct);
    }
    const double pad = 0.15 * std::max({x_hi - x_lo, ct_hi - ct_lo, 2.0});
    axis = {x_lo - pad, x_hi + pad, ct_lo - pad, ct_hi + pad};
  }

  const Mapper map = Mapper::fit(axis, dg.width, dg.height, 24.0);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_fixed(dg.width, 2)
      << "\" height=\"" << format_fixed(dg.height, 2) << "\" viewBox=\"0 0 "
      << format_fixed(dg.width, 2) << " " << format_fixed(dg.height, 2)
      << "\" font-family=\"sans-serif\">\n";
  svg << "  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  // Rest-frame axes through the coordinate origin, with unit calibration
  // marks at (1, 0) and (0, 1).
  const std::string axis_attrs = "class=\"axis\" stroke=\"#222222\" stroke-width=\"1.5\"";
  emit_clipped(svg, map, Event(0.0, 0.0), 1.0, 0.0, axis_attrs);
  emit_clipped(svg, map, Event(0.0, 0.0), 0.0, 1.0, axis_attrs);
  emit_tick(svg, map, Event(1.0, 0.0), "#222222");
  emit_tick(svg, map, Event(0.0, 1.0), "#222222");
  if (map.contains(Event(axis.x_max, 0.0)))
    svg << "  <text x=\"" << format_fixed(map.px(axis.x_max) - 16.0, 2) << "\" y=\""
        << format_fixed(map.py(0.0) - 8.0, 2) << "\" font-size=\"14\">x</text>\n";
  if (map.contains(Event(0.0, axis.ct_max)))
    svg << "  <text x=\"" << format_fixed(map.px(0.0) + 8.0, 2) << "\" y=\""
        << format_fixed(map.py(axis.ct_max) + 16.0, 2) << "\" font-size=\"14\">ct</text>\n";

  // Photon worldlines, forward in time from the source.
  const std::string photon_attrs =
      "class=\"photon\" stroke=\"#d08000\" stroke-width=\"1.5\" stroke-dasharray=\"7 4\"";
  emit_clipped(svg, map, sc.source, 1.0, 1.0, photon_attrs, 0.0);
  emit_clipped(svg, map, sc.source, -1.0, 1.0, photon_attrs, 0.0);

  // One overlay per analysis frame: boosted axes through the origin, the
  // simultaneity line through d, and the unit-hyperbola calibration points
  // x^2 - (ct)^2 = 1 at (gamma, beta gamma) and -1 at (beta gamma, gamma).
  for (std::size_t i = 0; i < ev.frames.size(); ++i) {
    const FrameEvents& fr = ev.frames[i];
    const std::string color = frame_color(i);
    const double gamma = Boost(fr.beta).gamma();
    const std::string frame_attrs =
        "class=\"frame\" data-beta=\"" + format_double(fr.beta) + "\" stroke=\"" + color +
        "\" stroke-width=\"1.2\"";
    emit_clipped(svg, map, Event(0.0, 0.0), fr.beta, 1.0, frame_attrs, 0.0);  // ct' axis
    emit_clipped(svg, map, Event(0.0, 0.0), 1.0, fr.beta, frame_attrs, 0.0);  // x' axis
    emit_clipped(svg, map, ev.d, 1.0, fr.beta,
                 frame_attrs + " stroke-dasharray=\"4 4\" data-through=\"d\"");
    emit_tick(svg, map, Event(gamma, fr.beta * gamma), color);
    emit_tick(svg, map, Event(fr.beta * gamma, gamma), color);
  }

  const bool single_frame = ev.frames.size() <= 1;
  for (const auto& [name, beta, at] : markers) {
    const bool per_frame = (name == "a" || name == "f");
    const std::string beta_attr =
        per_frame ? " data-beta=\"" + format_double(beta) + "\"" : "";
    const std::string text =
        (per_frame && !single_frame) ? name + " (" + format_double(beta) + ")" : name;
    emit_marker(svg, map, at, name, beta_attr, text);
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace relpair
