#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "relpair/errors.hpp"
#include "relpair/kinematics.hpp"
#include "relpair/polarization.hpp"
#include "relpair/rng.hpp"
#include "relpair/text.hpp"
#include "relpair/wavepacket.hpp"

// The collapse-ordering experiment: a source emits a polarization-singlet
// photon pair in opposite directions; an analyzer at x_d measures photon-1
// at event d; observers in other inertial frames read photon-2's state off
// their own lines of simultaneity through d. The module locates all the
// named events (d, b, per-frame a and f, optionally e for a second
// analyzer), runs the projective collapse, and checks that every frame's
// labeling of photon-2 agrees with the rest-frame record.

namespace relpair {

struct DetectorSpec {
  double x_d;
  MeasurementBasis basis;
};

/// Second analyzer in photon-1's path, at rest at rest_x in the frame moving
/// with beta. Without an explicit basis it is aligned with whatever state
/// detector_s transmitted, mapped into its frame.
struct SecondDetectorSpec {
  double rest_x;
  double beta;
  std::optional<MeasurementBasis> basis;
};

/// Wavepacket realization of the collapse trigger: photon-1 is a Gaussian
/// packet and d's time coordinate is the first grid time at which the
/// packet's mass inside the detector window reaches trigger_threshold.
struct WavepacketMode {
  double p0;  // momentum center; must be > 0 (toward the detector)
  double sigma_p;
  double grid_span;          // total width of the sampled slab, centered on the source
  std::size_t grid_points;
  double trigger_threshold = 0.5;
  double detector_half_width = 0.05;
};

/// Defaults reproduce the walkthrough setup: source at the origin, analyzer
/// one unit to the right, detection axis |z>.
struct Scenario {
  Event source{0.0, 0.0};
  DetectorSpec detector_s{1.0, MeasurementBasis(std::numbers::pi / 2.0)};
  std::optional<SecondDetectorSpec> detector_sprime;
  std::vector<double> analysis_betas;
  std::optional<WavepacketMode> wavepacket;
};

inline void validate(const Scenario& sc) {
  if (sc.source.ct != 0.0)
    throw ConfigError("the source event must sit at ct = 0");
  if (!(sc.detector_s.x_d > sc.source.x))
    throw ConfigError("detector_s must sit to the right of the source: x_d > x_o");
  for (double beta : sc.analysis_betas)
    if (!(std::abs(beta) < 1.0))
      throw ConfigError("analysis frame velocities must satisfy |beta| < 1");
  if (sc.detector_sprime && !(std::abs(sc.detector_sprime->beta) < 1.0))
    throw ConfigError("second detector frame velocity must satisfy |beta| < 1");
  if (sc.wavepacket) {
    const WavepacketMode& wp = *sc.wavepacket;
    if (!(wp.p0 > 0.0))
      throw ConfigError("wavepacket p0 must be positive (photon-1 moves toward the detector)");
    if (!(wp.sigma_p > 0.0)) throw ConfigError("wavepacket sigma_p must be positive");
    if (std::abs(wp.p0) < 6.0 * wp.sigma_p)
      throw ConfigError("wavepacket needs sign-definite support: p0 >= 6 sigma_p");
    if (!(wp.grid_span > 0.0) || wp.grid_points < 16)
      throw ConfigError("wavepacket grid needs positive span and at least 16 points");
    if (!(wp.trigger_threshold > 0.0) || wp.trigger_threshold > 1.0)
      throw ConfigError("trigger_threshold must lie in (0, 1]");
    if (!(wp.detector_half_width > 0.0))
      throw ConfigError("detector_half_width must be positive");
  }
}

inline Worldline photon1_worldline(const Scenario& sc) { return Worldline::photon(sc.source, 1); }
inline Worldline photon2_worldline(const Scenario& sc) { return Worldline::photon(sc.source, -1); }

/// First grid time at which the packet's window mass reaches the trigger
/// threshold. The scan slides the window across the t = 0 field (rigid
/// propagation), then the hit is re-validated against a directly evolved
/// field. ConfigError if the threshold is never reachable.
inline double collapse_trigger_time(const Scenario& sc) {
  validate(sc);
  if (!sc.wavepacket) throw ConfigError("collapse_trigger_time needs wavepacket mode");
  const WavepacketMode& wp = *sc.wavepacket;
  const MomentumAmplitude shape(wp.p0, wp.sigma_p);

  // Work in coordinates relative to the source.
  const double xi_d = sc.detector_s.x_d - sc.source.x;
  const Grid grid = Grid::over(-0.5 * wp.grid_span, 0.5 * wp.grid_span, wp.grid_points);
  const double hw = wp.detector_half_width;
  if (xi_d + hw > grid.back() - 2.0 * grid.dx)
    throw ConfigError("wavepacket grid_span too small to cover the detector window");

  const PositionField base = position_wavefunction(shape, grid, 0.0);

  // Prefix masses at cell edges; the mass over any interval is then a pair
  // of linear interpolations, matching detector_overlap's per-cell clipping.
  std::vector<double> edge_mass(grid.n + 1, 0.0);
  for (std::size_t i = 0; i < grid.n; ++i)
    edge_mass[i + 1] = edge_mass[i] + std::norm(base.values[i]) * grid.dx;
  const double edge0 = grid.front() - 0.5 * grid.dx;
  auto mass_to = [&](double x) {
    const double cell = (x - edge0) / grid.dx;
    if (cell <= 0.0) return 0.0;
    if (cell >= static_cast<double>(grid.n)) return edge_mass[grid.n];
    const std::size_t i = static_cast<std::size_t>(cell);
    return edge_mass[i] + (cell - static_cast<double>(i)) * (edge_mass[i + 1] - edge_mass[i]);
  };

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * grid.dx;
    const double wlo = xi_d - hw - t;
    const double whi = xi_d + hw - t;
    if (wlo < edge0) break;  // window slid past the packet without triggering
    const double overlap = mass_to(whi) - mass_to(wlo);
    if (overlap >= wp.trigger_threshold) {
      // Cross-check the slide against direct evolution.
      const PositionField moved = position_wavefunction(shape, grid, t);
      const double direct = detector_overlap(moved, xi_d, hw);
      if (std::abs(direct - overlap) > 1e-6)
        throw std::runtime_error("wavepacket trigger validation failed: slide and direct "
                                 "evolution disagree");
      return t;
    }
  }
  throw ConfigError("trigger_threshold is never reached: detector window too narrow for the "
                    "packet width");
}

/// Per-analysis-frame geometry: a is d's simultaneity partner on photon-2's
/// worldline, f is b's partner on photon-1's.
struct FrameEvents {
  double beta;
  Event a;
  Event f;
};

struct LocatedEvents {
  Event d;
  Event b;
  std::vector<FrameEvents> frames;
  std::optional<Event> e;  // second analyzer's crossing of photon-1, when configured
  double ct_d;
};

namespace detail {

inline Event locate_d(const Scenario& sc) {
  if (sc.wavepacket) return Event(sc.detector_s.x_d, collapse_trigger_time(sc));
  const auto hit = intersect(photon1_worldline(sc), Worldline::detector(sc.detector_s.x_d));
  if (!hit) throw GeometryError("photon-1 never reaches detector_s");
  return *hit;
}

inline Event locate_b(const Scenario& sc, const Event& d) {
  const auto b = simultaneity_partner(d, photon2_worldline(sc), Boost(0.0));
  if (!b) throw GeometryError("photon-2 worldline degenerate");
  return *b;
}

/// e = the second analyzer's crossing of photon-1, validated to lie strictly
/// between d and f (f computed in the analyzer's own frame).
inline Event locate_e(const Scenario& sc, const Event& d, const Event& b) {
  const SecondDetectorSpec& spec = *sc.detector_sprime;
  const Worldline track = Worldline::detector(spec.rest_x, spec.beta);
  const auto hit = intersect(photon1_worldline(sc), track);
  if (!hit) throw ConfigError("second detector never crosses photon-1's worldline");
  const auto f = simultaneity_partner(b, photon1_worldline(sc), Boost(spec.beta));
  if (!f) throw ConfigError("second detector frame has no simultaneity partner f");
  if (!(hit->ct > d.ct && hit->ct < f->ct))
    throw ConfigError("second detector must cross photon-1 strictly between events d and f");
  return *hit;
}

}  // namespace detail

inline LocatedEvents locate_events(const Scenario& sc) {
  validate(sc);
  const Event d = detail::locate_d(sc);
  const Event b = detail::locate_b(sc, d);

  LocatedEvents out{d, b, {}, std::nullopt, d.ct};
  out.frames.reserve(sc.analysis_betas.size());
  for (double beta : sc.analysis_betas) {
    const Boost boost(beta);
    const auto a = simultaneity_partner(d, photon2_worldline(sc), boost);
    const auto f = simultaneity_partner(b, photon1_worldline(sc), boost);
    if (!a || !f) throw GeometryError("simultaneity partner undefined for analysis frame");
    out.frames.push_back({beta, *a, *f});
  }
  if (sc.detector_sprime) out.e = detail::locate_e(sc, d, b);
  return out;
}

/// One sampled collapse: photon-1 measured at d in detector_s's basis.
/// For the singlet, photon-2 snaps to the axis orthogonal to photon-1's
/// outcome, which is the other axis of the same analyzer.
struct CollapseRecord {
  Event d_event;
  Event b_event;
  MeasurementBasis basis;
  bool fired;
  PolState collapsed;
  PolVec photon1_axis;
  PolVec photon2_axis;
  std::string photon1_label;
  std::string photon2_label;
};

inline CollapseRecord run_collapse(const Scenario& sc, const LocatedEvents& located, Rng& rng) {
  const Outcome o = measure_photon(PolState::singlet(), 1, sc.detector_s.basis, rng);
  const MeasurementBasis& basis = sc.detector_s.basis;
  CollapseRecord rec{located.d,
                     located.b,
                     basis,
                     o.fired,
                     o.collapsed,
                     o.fired ? basis.detected() : basis.transmitted(),
                     o.fired ? basis.transmitted() : basis.detected(),
                     o.fired ? basis.detected_label() : basis.transmitted_label(),
                     o.fired ? basis.transmitted_label() : basis.detected_label()};
  return rec;
}

inline CollapseRecord run_collapse(const Scenario& sc, Rng& rng) {
  return run_collapse(sc, locate_events(sc), rng);
}

/// Outcome of pointing a second analyzer at whatever detector_s let through.
struct SecondDetectorResult {
  double probability;  // Born probability that the second analyzer fires
  bool fired_sample;   // one draw at that probability
  Event e_event;
};

/// Probability that the second analyzer fires on photon-1 given the collapse
/// record. An aligned analyzer (no explicit basis) detects the frame-mapped
/// transmitted state itself, so on transmitted runs the probability is
/// exactly 1; an explicit basis projects as usual. Fired runs absorbed the
/// photon at d, leaving nothing to detect.
inline SecondDetectorResult second_detector_check(const CollapseRecord& rec, const Scenario& sc,
                                                  Rng& rng) {
  validate(sc);
  if (!sc.detector_sprime) throw ConfigError("second_detector_check needs detector_sprime");
  const Event d = rec.d_event;
  const Event b = rec.b_event;
  const Event e = detail::locate_e(sc, d, b);

  if (rec.fired) return {0.0, rng.bernoulli(0.0), e};

  const SecondDetectorSpec& spec = *sc.detector_sprime;
  const Boost frame(spec.beta);
  // Photon-1 flies on in the transmitted state; its components carry over
  // into the analyzer's frame unchanged.
  const PolVec state = frame_map(rec.photon1_axis, frame);

  double p;
  if (!spec.basis) {
    // Aligned by construction with the very state that is coming: the
    // projection is the identity on that ray.
    p = 1.0;
  } else {
    const PolVec axis = frame_map(spec.basis->detected(), frame);
    const cplx overlap = std::conj(axis[0]) * state[0] + std::conj(axis[1]) * state[1];
    p = std::clamp(std::norm(overlap), 0.0, 1.0);
  }
  return {p, rng.bernoulli(p), e};
}

/// How a single inertial frame reads the record: where its "now" through d
/// meets photon-2, what label photon-2 carries there, and whether d comes
/// before the rest-frame partner b in that frame's time.
struct FrameView {
  double beta;
  Event partner_event;  // the a-point of this frame
  bool d_before_partner;
  std::string photon2_label;
  std::optional<PolVec> photon2_axis;  // absent when the label is "entangled"
  double past_reach;
  bool consistent;
};

struct Violation {
  double beta;
  Event a_event;
  std::string detail;
};

/// Labeling rules the consistency engine can run under.
/// RelativisticConsistent: the collapse label rides the record into every
/// frame (components unchanged under frame_map), so each frame reads the
/// same photon-2 state on its line through d.
/// RestFrameLineOnly: the deliberately wrong alternative: the collapse takes
/// effect only on the rest frame's ct = ct_d line, and any a-point earlier
/// than that still carries the entangled label.
enum class CollapsePolicy { RelativisticConsistent, RestFrameLineOnly };

inline std::string to_string(CollapsePolicy p) {
  return p == CollapsePolicy::RelativisticConsistent ? "relativistic-consistent"
                                                     : "rest-frame-line-only";
}

inline CollapsePolicy collapse_policy_from_string(const std::string& name) {
  if (name == "relativistic-consistent") return CollapsePolicy::RelativisticConsistent;
  if (name == "rest-frame-line-only") return CollapsePolicy::RestFrameLineOnly;
  throw ConfigError("unknown collapse policy: " + name +
                    " (expected relativistic-consistent or rest-frame-line-only)");
}

struct ConsistencyReport {
  CollapsePolicy policy;
  std::vector<FrameView> frames;
  std::vector<Violation> violations;
  bool all_consistent;
};

/// Evaluate every analysis frame's view of the record under the given
/// policy. Pure in (rec, sc, policy): permuting analysis_betas permutes the
/// views without changing any of them.
inline ConsistencyReport frame_consistency(const CollapseRecord& rec, const Scenario& sc,
                                           CollapsePolicy policy = CollapsePolicy::RelativisticConsistent) {
  validate(sc);
  ConsistencyReport report{policy, {}, {}, true};
  report.frames.reserve(sc.analysis_betas.size());
  const Worldline photon2 = photon2_worldline(sc);
  const double ct_d = rec.d_event.ct;
  const double line_tol = 1e-12 * std::max(1.0, std::abs(ct_d));

  for (double beta : sc.analysis_betas) {
    const Boost boost(beta);
    const auto a = simultaneity_partner(rec.d_event, photon2, boost);
    if (!a) throw GeometryError("simultaneity partner undefined for analysis frame");

    FrameView view{beta, *a, false, "", std::nullopt, past_reach(rec.d_event, *a), true};
    view.d_before_partner =
        boost_event(rec.d_event, boost).ct < boost_event(rec.b_event, boost).ct;

    const bool before_rest_line = a->ct < ct_d - line_tol;
    if (policy == CollapsePolicy::RestFrameLineOnly && before_rest_line) {
      view.photon2_label = "entangled";
      view.photon2_axis = std::nullopt;
    } else {
      // The frame-mapped record: same components, same label.
      view.photon2_label = rec.photon2_label;
      view.photon2_axis = frame_map(rec.photon2_axis, boost);
    }

    view.consistent = (view.photon2_label == rec.photon2_label);
    if (!view.consistent) {
      report.all_consistent = false;
      report.violations.push_back(
          {beta, *a,
           "frame beta=" + format_double(beta) + " labels photon-2 '" + view.photon2_label +
               "' at event a=(" + format_double(a->x) + ", " + format_double(a->ct) +
               ") but the collapse record says '" + rec.photon2_label + "'"});
    }
    report.frames.push_back(std::move(view));
  }
  return report;
}

struct PastReachRow {
  double beta;
  double reach;
  double fraction_of_ct_d;
};

/// reach(beta) = ct_d - ct_a for each analysis frame; the fraction is
/// against ct_d (emission at ct = 0), whose supremum 1 is approached as
/// beta -> 1 but never attained.
inline std::vector<PastReachRow> past_reach_report(const CollapseRecord& rec, const Scenario& sc) {
  validate(sc);
  std::vector<PastReachRow> rows;
  rows.reserve(sc.analysis_betas.size());
  const Worldline photon2 = photon2_worldline(sc);
  for (double beta : sc.analysis_betas) {
    const auto a = simultaneity_partner(rec.d_event, photon2, Boost(beta));
    if (!a) throw GeometryError("simultaneity partner undefined for analysis frame");
    const double reach = past_reach(rec.d_event, *a);
    rows.push_back({beta, reach, reach / rec.d_event.ct});
  }
  return rows;
}

}  // namespace relpair
