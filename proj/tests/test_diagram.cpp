#include <gtest/gtest.h>

#include <cmath>
#include <regex>
#include <string>
#include <vector>

#include "relpair/diagram.hpp"

namespace {

using namespace relpair;

struct Marker {
  std::string event;
  std::string beta;
  double cx;
  double cy;
};

struct Segment {
  double x1, y1, x2, y2;
  std::string rest;  // attributes after the coordinates
};

std::vector<Marker> parse_markers(const std::string& svg) {
  static const std::regex re(
      "<circle class=\"event\" data-event=\"(\\w+)\"(?: data-beta=\"([^\"]*)\")? "
      "cx=\"([-0-9.]+)\" cy=\"([-0-9.]+)\"");
  std::vector<Marker> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator();
       ++it)
    out.push_back({(*it)[1], (*it)[2], std::stod((*it)[3]), std::stod((*it)[4])});
  return out;
}

std::vector<Segment> parse_lines(const std::string& svg, const std::string& needle) {
  static const std::regex re(
      "<line x1=\"([-0-9.]+)\" y1=\"([-0-9.]+)\" x2=\"([-0-9.]+)\" y2=\"([-0-9.]+)\" (.*?)/>");
  std::vector<Segment> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator();
       ++it) {
    Segment seg{std::stod((*it)[1]), std::stod((*it)[2]), std::stod((*it)[3]),
                std::stod((*it)[4]), (*it)[5]};
    if (seg.rest.find(needle) != std::string::npos) out.push_back(seg);
  }
  return out;
}

std::vector<std::pair<double, double>> parse_ticks(const std::string& svg,
                                                   const std::string& color) {
  static const std::regex re(
      "<circle class=\"tick\" cx=\"([-0-9.]+)\" cy=\"([-0-9.]+)\" r=\"2.50\" "
      "fill=\"([^\"]+)\"");
  std::vector<std::pair<double, double>> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator();
       ++it)
    if ((*it)[3] == color) out.emplace_back(std::stod((*it)[1]), std::stod((*it)[2]));
  return out;
}

// Pixel mapping for the fixed test viewport: axis x [-2, 5], ct [-1, 5],
// 720x720 canvas, 24 px margin, uniform scale min(672/7, 672/6) = 96.
constexpr double kScale = 96.0;
double px(double x) { return 360.0 + (x - 1.5) * kScale; }
double py(double ct) { return 360.0 - (ct - 2.0) * kScale; }

DiagramConfig test_viewport() {
  DiagramConfig dg;
  dg.axis = AxisRange{-2.0, 5.0, -1.0, 5.0};
  return dg;
}

Scenario walkthrough(std::vector<double> betas = {0.6}) {
  Scenario sc;
  sc.detector_s = {1.0, MeasurementBasis(0.0)};
  sc.analysis_betas = std::move(betas);
  return sc;
}

const Marker& find_marker(const std::vector<Marker>& markers, const std::string& event,
                          const std::string& beta = "") {
  for (const Marker& m : markers)
    if (m.event == event && (beta.empty() || m.beta == beta)) return m;
  throw std::runtime_error("marker not found: " + event);
}

TEST(Diagram, MarkersMatchLocatedEventsWithinHalfPixel) {
  const Scenario sc = walkthrough();
  const LocatedEvents ev = locate_events(sc);
  const std::string svg = render_diagram(sc, ev, test_viewport(), {"d", "b", "a", "f"});

  const auto markers = parse_markers(svg);
  ASSERT_EQ(markers.size(), 4u);
  const struct {
    const char* name;
    Event at;
  } expected[] = {{"d", ev.d}, {"b", ev.b}, {"a", ev.frames[0].a}, {"f", ev.frames[0].f}};
  for (const auto& [name, at] : expected) {
    const Marker& m = find_marker(markers, name);
    EXPECT_NEAR(m.cx, px(at.x), 0.5) << name;
    EXPECT_NEAR(m.cy, py(at.ct), 0.5) << name;
  }
  EXPECT_EQ(find_marker(markers, "a").beta, "0.6");
}

TEST(Diagram, RestFrameAxesAreOrthogonal) {
  const Scenario sc = walkthrough();
  const std::string svg = render_diagram(sc, locate_events(sc), test_viewport(), {"d"});
  const auto axes = parse_lines(svg, "class=\"axis\"");
  ASSERT_EQ(axes.size(), 2u);
  EXPECT_DOUBLE_EQ(axes[0].y1, axes[0].y2);  // x axis is horizontal
  EXPECT_DOUBLE_EQ(axes[1].x1, axes[1].x2);  // ct axis is vertical
  EXPECT_NEAR(axes[0].y1, py(0.0), 0.01);
  EXPECT_NEAR(axes[1].x1, px(0.0), 0.01);
}

TEST(Diagram, PhotonWorldlinesRunAt45Degrees) {
  const Scenario sc = walkthrough();
  const std::string svg = render_diagram(sc, locate_events(sc), test_viewport(), {"d"});
  const auto photons = parse_lines(svg, "class=\"photon\"");
  ASSERT_EQ(photons.size(), 2u);
  const double s1 = (photons[0].y2 - photons[0].y1) / (photons[0].x2 - photons[0].x1);
  const double s2 = (photons[1].y2 - photons[1].y1) / (photons[1].x2 - photons[1].x1);
  EXPECT_NEAR(s1, -1.0, 0.01);  // right mover: up-right on screen
  EXPECT_NEAR(s2, 1.0, 0.01);   // left mover
  // Both start at the source.
  EXPECT_NEAR(photons[0].x1, px(0.0), 0.01);
  EXPECT_NEAR(photons[0].y1, py(0.0), 0.01);
}

TEST(Diagram, BoostedAxesFollowTheirDefiningLines) {
  const Scenario sc = walkthrough();
  const std::string svg = render_diagram(sc, locate_events(sc), test_viewport(), {"d"});
  const auto frame_lines = parse_lines(svg, "class=\"frame\"");
  ASSERT_GE(frame_lines.size(), 3u);

  // ct' axis: x = beta ct, drawn first. Screen slope dx/dy = -beta.
  const Segment& ct_axis = frame_lines[0];
  EXPECT_NEAR((ct_axis.x2 - ct_axis.x1) / (ct_axis.y2 - ct_axis.y1), -0.6, 0.01);
  // x' axis: ct = beta x. Screen slope dy/dx = -beta.
  const Segment& x_axis = frame_lines[1];
  EXPECT_NEAR((x_axis.y2 - x_axis.y1) / (x_axis.x2 - x_axis.x1), -0.6, 0.01);
  // Both pass through the origin.
  EXPECT_NEAR(ct_axis.x1, px(0.0), 0.01);
  EXPECT_NEAR(ct_axis.y1, py(0.0), 0.01);
}

TEST(Diagram, SimultaneityLinePassesThroughD) {
  const Scenario sc = walkthrough();
  const LocatedEvents ev = locate_events(sc);
  const std::string svg = render_diagram(sc, ev, test_viewport(), {"d"});
  const auto lines = parse_lines(svg, "data-through=\"d\"");
  ASSERT_EQ(lines.size(), 1u);
  const Segment& line = lines[0];
  // Distance from d's pixel to the line.
  const double dx = line.x2 - line.x1;
  const double dy = line.y2 - line.y1;
  const double len = std::hypot(dx, dy);
  const double dist =
      std::abs(dy * (px(ev.d.x) - line.x1) - dx * (py(ev.d.ct) - line.y1)) / len;
  EXPECT_LT(dist, 0.5);
  // And its world slope is beta.
  EXPECT_NEAR(-dy / dx, 0.6, 0.01);
}

TEST(Diagram, CalibrationTicksSitOnTheUnitHyperbolas) {
  const Scenario sc = walkthrough();
  const std::string svg = render_diagram(sc, locate_events(sc), test_viewport(), {"d"});
  const auto ticks = parse_ticks(svg, "#1668b4");
  ASSERT_EQ(ticks.size(), 2u);
  const double gamma = 1.25;
  EXPECT_NEAR(ticks[0].first, px(gamma), 0.5);         // (gamma, beta gamma) on x'
  EXPECT_NEAR(ticks[0].second, py(0.6 * gamma), 0.5);
  EXPECT_NEAR(ticks[1].first, px(0.6 * gamma), 0.5);   // (beta gamma, gamma) on ct'
  EXPECT_NEAR(ticks[1].second, py(gamma), 0.5);
}

TEST(Diagram, NoFrameOverlaysWithoutBetas) {
  const Scenario sc = walkthrough({});
  const std::string svg = render_diagram(sc, locate_events(sc), test_viewport(), {"d", "b"});
  EXPECT_EQ(parse_lines(svg, "class=\"frame\"").size(), 0u);
  EXPECT_EQ(parse_lines(svg, "class=\"axis\"").size(), 2u);
  EXPECT_EQ(parse_lines(svg, "class=\"photon\"").size(), 2u);
  EXPECT_EQ(parse_markers(svg).size(), 2u);
}

TEST(Diagram, AxisRangeMustContainEveryLabeledEvent) {
  const Scenario sc = walkthrough();
  const LocatedEvents ev = locate_events(sc);
  DiagramConfig dg;
  dg.axis = AxisRange{-2.0, 5.0, -1.0, 3.0};  // excludes f = (4, 4)
  try {
    render_diagram(sc, ev, dg, {"d", "b", "a", "f"});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("event f"), std::string::npos);
  }
  // Dropping f from the labels makes the same range acceptable.
  EXPECT_NO_THROW(render_diagram(sc, ev, dg, {"d", "b", "a"}));
}

TEST(Diagram, EventERequiresASecondDetector) {
  const Scenario sc = walkthrough();
  const LocatedEvents ev = locate_events(sc);
  EXPECT_THROW(render_diagram(sc, ev, test_viewport(), {"d", "e"}), ConfigError);

  Scenario with_e = walkthrough();
  with_e.detector_sprime = SecondDetectorSpec{1.0, 0.6, std::nullopt};
  const LocatedEvents ev2 = locate_events(with_e);
  const std::string svg = render_diagram(with_e, ev2, test_viewport(), {"d", "e"});
  const Marker& m = find_marker(parse_markers(svg), "e");
  EXPECT_NEAR(m.cx, px(2.0), 0.5);
  EXPECT_NEAR(m.cy, py(2.0), 0.5);
}

TEST(Diagram, MultiFrameMarkersAreTaggedWithTheirBeta) {
  const Scenario sc = walkthrough({0.6, -0.6});
  const LocatedEvents ev = locate_events(sc);
  DiagramConfig dg;
  dg.axis = AxisRange{-5.0, 5.0, -1.0, 5.0};
  const std::string svg = render_diagram(sc, ev, dg, {"a"});
  const auto markers = parse_markers(svg);
  ASSERT_EQ(markers.size(), 2u);
  EXPECT_NO_THROW(find_marker(markers, "a", "0.6"));
  EXPECT_NO_THROW(find_marker(markers, "a", "-0.6"));
  EXPECT_NE(svg.find(">a (0.6)</text>"), std::string::npos);
  EXPECT_NE(svg.find(">a (-0.6)</text>"), std::string::npos);

  const std::string single = render_diagram(walkthrough(), locate_events(walkthrough()),
                                            test_viewport(), {"a"});
  EXPECT_NE(single.find(">a</text>"), std::string::npos);
}

TEST(Diagram, RenderingIsDeterministic) {
  const Scenario sc = walkthrough({0.6, -0.6, 0.3});
  const LocatedEvents ev = locate_events(sc);
  DiagramConfig dg;  // auto-fitted axis
  const std::string one = render_diagram(sc, ev, dg, {"d", "b", "a", "f"});
  const std::string two = render_diagram(sc, ev, dg, {"d", "b", "a", "f"});
  EXPECT_EQ(one, two);
  EXPECT_EQ(parse_markers(one).size(), 8u);  // d, b, and a/f per frame
}

TEST(Diagram, AutoAxisCoversAllMarkers) {
  const Scenario sc = walkthrough({0.99});  // f shoots far up the cone
  const LocatedEvents ev = locate_events(sc);
  DiagramConfig dg;
  const std::string svg = render_diagram(sc, ev, dg, {"d", "b", "a", "f"});
  const auto markers = parse_markers(svg);
  EXPECT_EQ(markers.size(), 4u);
  for (const Marker& m : markers) {
    EXPECT_GE(m.cx, 0.0);
    EXPECT_LE(m.cx, 720.0);
    EXPECT_GE(m.cy, 0.0);
    EXPECT_LE(m.cy, 720.0);
  }
}

}  // namespace
