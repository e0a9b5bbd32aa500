#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "relpair/errors.hpp"

// Flat 1+1-dimensional special-relativistic kinematics in natural units:
// c = 1, time carried as ct so both coordinates share one length unit.
// Metric convention for the invariant interval: s^2 = dx^2 - d(ct)^2,
// positive for spacelike separation.

namespace relpair {

/// A point in 1+1 spacetime. Coordinates must be finite.
struct Event {
  double x = 0.0;
  double ct = 0.0;

  Event() = default;
  Event(double x_, double ct_) : x(x_), ct(ct_) {
    if (!std::isfinite(x) || !std::isfinite(ct))
      throw std::domain_error("Event coordinates must be finite");
  }
};

/// A pure boost along x with velocity beta = v/c, |beta| < 1.
class Boost {
 public:
  explicit Boost(double beta) : beta_(beta) {
    if (!(std::abs(beta) < 1.0))  // also rejects NaN
      throw std::domain_error("boost velocity must satisfy |beta| < 1");
    gamma_ = 1.0 / std::sqrt(1.0 - beta * beta);
  }

  double beta() const { return beta_; }
  double gamma() const { return gamma_; }

  Boost inverse() const { return Boost(-beta_); }

  /// The single boost equivalent to applying *this, then `next`
  /// (relativistic velocity addition; closed under |beta| < 1).
  Boost then(const Boost& next) const {
    return Boost((beta_ + next.beta_) / (1.0 + beta_ * next.beta_));
  }

 private:
  double beta_;
  double gamma_;
};

/// Coordinates of e in the frame moving with velocity b.beta() relative to
/// the frame e is expressed in.
inline Event boost_event(const Event& e, const Boost& b) {
  return Event(b.gamma() * (e.x - b.beta() * e.ct),
               b.gamma() * (e.ct - b.beta() * e.x));
}

enum class IntervalKind { Spacelike, Timelike, Lightlike };

struct Interval {
  IntervalKind kind;
  double s_squared;
};

/// Invariant interval between two events. |s^2| <= tol classifies as
/// lightlike; the default matches double noise over unit-scale scenarios.
inline Interval interval(const Event& e1, const Event& e2, double tol = 1e-10) {
  const double dx = e2.x - e1.x;
  const double dct = e2.ct - e1.ct;
  const double s2 = dx * dx - dct * dct;
  IntervalKind kind = IntervalKind::Lightlike;
  if (s2 > tol)
    kind = IntervalKind::Spacelike;
  else if (s2 < -tol)
    kind = IntervalKind::Timelike;
  return {kind, s2};
}

/// Implicit line nx*x + nct*ct = c with unit normal, canonicalized so that
/// (nx, nct) is unique for a given geometric line: nx > 0, or nx == 0 and
/// nct > 0. Two canonical lines are parallel iff their normals agree.
struct Line2 {
  double nx;
  double nct;
  double c;

  static Line2 canonical(double nx, double nct, double c) {
    if (nx < 0.0 || (nx == 0.0 && nct < 0.0)) {
      nx = -nx;
      nct = -nct;
      c = -c;
    }
    return {nx, nct, c};
  }

  /// Line through p with coordinate velocity v = dx/d(ct).
  static Line2 from_point_velocity(const Event& p, double v) {
    const double h = std::hypot(1.0, v);
    return canonical(1.0 / h, -v / h, (p.x - v * p.ct) / h);
  }
};

/// Intersection of two canonical lines. Distinct parallel lines yield
/// nullopt; coincident lines have no unique intersection and throw.
inline std::optional<Event> intersect(const Line2& l1, const Line2& l2) {
  const double det = l1.nx * l2.nct - l2.nx * l1.nct;
  // Unit normals make |det| = |sin(angle between lines)|.
  if (std::abs(det) < 1e-12) {
    if (std::abs(l1.c - l2.c) < 1e-12)
      throw GeometryError("coincident worldlines have no unique intersection");
    return std::nullopt;
  }
  return Event((l1.c * l2.nct - l2.c * l1.nct) / det,
               (l1.nx * l2.c - l2.nx * l1.c) / det);
}

/// Worldline of a photon (coordinate speed exactly 1) or of a detector
/// (a fixed position in some inertial frame, possibly boosted relative to
/// the frame the worldline is used in).
class Worldline {
 public:
  enum class Kind { Photon, Detector };

  /// Photon emitted at `origin` moving toward +x (direction = +1) or -x (-1).
  static Worldline photon(const Event& origin, int direction) {
    if (direction != 1 && direction != -1)
      throw std::domain_error("photon direction must be +1 or -1");
    Worldline w;
    w.kind_ = Kind::Photon;
    w.origin_ = origin;
    w.direction_ = direction;
    return w;
  }

  /// Detector at rest at coordinate rest_x in the frame moving with
  /// rest_frame_beta relative to the frame this worldline is used in.
  static Worldline detector(double rest_x, double rest_frame_beta = 0.0) {
    if (!std::isfinite(rest_x))
      throw std::domain_error("detector rest position must be finite");
    Boost b(rest_frame_beta);  // validates |beta| < 1
    Worldline w;
    w.kind_ = Kind::Detector;
    w.rest_x_ = rest_x;
    w.beta_ = rest_frame_beta;
    w.gamma_ = b.gamma();
    return w;
  }

  Kind kind() const { return kind_; }
  int direction() const { return direction_; }
  const Event& origin() const { return origin_; }

  /// Coordinate velocity dx/d(ct) in the frame the worldline lives in.
  double velocity() const {
    return kind_ == Kind::Photon ? static_cast<double>(direction_) : beta_;
  }

  /// Implicit form in the frame the worldline lives in. For a detector the
  /// rest-frame condition x' = rest_x becomes x - beta*ct = rest_x/gamma.
  Line2 line() const {
    if (kind_ == Kind::Photon) return Line2::from_point_velocity(origin_, velocity());
    return Line2::from_point_velocity(Event(rest_x_ / gamma_, 0.0), beta_);
  }

  /// Position at a given time coordinate.
  double x_at(double ct) const {
    if (kind_ == Kind::Photon) return origin_.x + velocity() * (ct - origin_.ct);
    return rest_x_ / gamma_ + beta_ * ct;
  }

 private:
  Worldline() = default;
  Kind kind_ = Kind::Photon;
  Event origin_{};
  int direction_ = 1;
  double rest_x_ = 0.0;
  double beta_ = 0.0;
  double gamma_ = 1.0;
};

/// The set of events sharing time coordinate ct' in the frame moving with
/// frame_beta; in base-frame coordinates, gamma*(ct - beta*x) = ct'.
struct SimultaneityLine {
  double frame_beta;
  double ct_prime;

  static SimultaneityLine through(const Event& e, const Boost& b) {
    return {b.beta(), boost_event(e, b).ct};
  }

  Line2 line() const {
    Boost b(frame_beta);
    const double h = std::hypot(frame_beta, 1.0);
    return Line2::canonical(-frame_beta / h, 1.0 / h, ct_prime / (b.gamma() * h));
  }
};

inline std::optional<Event> intersect(const Worldline& w1, const Worldline& w2) {
  return intersect(w1.line(), w2.line());
}

inline std::optional<Event> intersect(const Worldline& w, const SimultaneityLine& s) {
  return intersect(w.line(), s.line());
}

/// The event on w that observers moving with b consider simultaneous with
/// `anchor`: the intersection of w with the boosted-frame simultaneity line
/// through anchor. nullopt only if w is parallel to that line, which for a
/// valid boost requires a photon worldline and |beta| -> 1.
inline std::optional<Event> simultaneity_partner(const Event& anchor,
                                                 const Worldline& w,
                                                 const Boost& b) {
  return intersect(w, SimultaneityLine::through(anchor, b));
}

/// How far into the base frame's past the boosted frame's "now" through d
/// reaches on the far worldline: ct_d - ct_a, where a is d's simultaneity
/// partner. Positive when the partner lies in the base frame's past.
inline double past_reach(const Event& d, const Event& a) { return d.ct - a.ct; }

/// Same quantity via the simultaneity-line slope: partners of d in the frame
/// moving with b satisfy ct_d - ct_a = beta * (x_d - x_a). Kept as a separate
/// route so tests can pin the two against each other.
inline double past_reach_from_positions(const Event& d, const Event& a, const Boost& b) {
  return b.beta() * (d.x - a.x);
}

}  // namespace relpair
