#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "relpair/kinematics.hpp"
#include "relpair/rng.hpp"
#include "relpair/text.hpp"

// Polarization state space for a photon pair, with projective measurement
// and CHSH evaluation.
//
// Ordering conventions used everywhere in this library:
//   single photon components are over (|z>, |y>);
//   pair amplitudes over (|z>1|z>2, |z>1|y>2, |y>1|z>2, |y>1|y>2),
//   i.e. amplitudes[2*i + j] with i the photon-1 index and j the photon-2
//   index, 0 = z and 1 = y.
//
// A boost along the propagation axis maps the transverse axes y, z onto the
// primed axes without mixing them, so states and operators keep their
// components across frames; frame_map spells that out in code.

namespace relpair {

using cplx = std::complex<double>;
using PolVec = std::array<cplx, 2>;
using JointAmps = std::array<cplx, 4>;

inline double norm_squared(const PolVec& v) { return std::norm(v[0]) + std::norm(v[1]); }

inline double norm_squared(const JointAmps& a) {
  return std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]) + std::norm(a[3]);
}

inline PolVec normalized(const PolVec& v) {
  const double n = std::sqrt(norm_squared(v));
  if (n < 1e-12) throw std::invalid_argument("cannot normalize a near-zero polarization vector");
  return {v[0] / n, v[1] / n};
}

/// 2x2 Hermitian operator on one photon, components over (|z>, |y>).
/// Hermiticity is enforced at construction, so every SinglePhotonOp in
/// circulation is a valid observable.
class SinglePhotonOp {
 public:
  SinglePhotonOp(cplx zz, cplx zy, cplx yz, cplx yy) : m_{{zz, zy}, {yz, yy}} {
    if (std::abs(zz.imag()) > kHermTol || std::abs(yy.imag()) > kHermTol ||
        std::abs(zy - std::conj(yz)) > kHermTol)
      throw std::invalid_argument("operator entries must form a Hermitian matrix");
  }

  static SinglePhotonOp identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static SinglePhotonOp sigma1() { return {0.0, 1.0, 1.0, 0.0}; }
  static SinglePhotonOp sigma2() { return {0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0}; }
  static SinglePhotonOp sigma3() { return {1.0, 0.0, 0.0, -1.0}; }

  cplx at(int r, int c) const { return m_[r][c]; }

  PolVec apply(const PolVec& v) const {
    return {m_[0][0] * v[0] + m_[0][1] * v[1], m_[1][0] * v[0] + m_[1][1] * v[1]};
  }

  friend SinglePhotonOp operator+(const SinglePhotonOp& a, const SinglePhotonOp& b) {
    return {a.m_[0][0] + b.m_[0][0], a.m_[0][1] + b.m_[0][1],
            a.m_[1][0] + b.m_[1][0], a.m_[1][1] + b.m_[1][1]};
  }
  friend SinglePhotonOp operator-(const SinglePhotonOp& a, const SinglePhotonOp& b) {
    return {a.m_[0][0] - b.m_[0][0], a.m_[0][1] - b.m_[0][1],
            a.m_[1][0] - b.m_[1][0], a.m_[1][1] - b.m_[1][1]};
  }
  friend SinglePhotonOp operator*(double s, const SinglePhotonOp& op) {
    return {s * op.m_[0][0], s * op.m_[0][1], s * op.m_[1][0], s * op.m_[1][1]};
  }
  friend SinglePhotonOp operator-(const SinglePhotonOp& op) { return -1.0 * op; }

 private:
  static constexpr double kHermTol = 1e-12;
  cplx m_[2][2];
};

struct EigenPair {
  double value;
  PolVec vector;
};

/// Eigensystem of a Hermitian 2x2, closed form; `plus.value >= minus.value`
/// and the vectors are orthonormal.
struct EigenSystem2 {
  EigenPair plus;
  EigenPair minus;
};

inline EigenSystem2 eigensystem(const SinglePhotonOp& op) {
  const double a = op.at(0, 0).real();
  const double c = op.at(1, 1).real();
  const cplx b = op.at(0, 1);
  const double mid = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), std::abs(b));
  if (rad < 1e-14 * (1.0 + std::abs(mid))) {
    // Multiple of the identity: any orthonormal basis is an eigenbasis.
    return {{mid, {1.0, 0.0}}, {mid, {0.0, 1.0}}};
  }
  const double lp = mid + rad;
  const double lm = mid - rad;
  auto vector_for = [&](double lambda) -> PolVec {
    // (b, lambda - a) solves the eigenproblem when b != 0; fall back to the
    // diagonal basis otherwise.
    if (std::abs(b) > 1e-14 * rad) return normalized({b, cplx(lambda - a)});
    return (std::abs(lambda - a) < std::abs(lambda - c)) ? PolVec{1.0, 0.0}
                                                         : PolVec{0.0, 1.0};
  };
  return {{lp, vector_for(lp)}, {lm, vector_for(lm)}};
}

/// Joint polarization state of the photon pair, kept normalized.
class PolState {
 public:
  /// Normalizes; rejects near-zero amplitude vectors.
  static PolState from_amplitudes(const JointAmps& a) {
    const double n = std::sqrt(norm_squared(a));
    if (n < 1e-12) throw std::invalid_argument("pair amplitudes must not all vanish");
    return PolState({a[0] / n, a[1] / n, a[2] / n, a[3] / n});
  }

  /// The maximally entangled combination (|z>1|y>2 - |y>1|z>2)/sqrt(2).
  static PolState singlet() {
    const double r = 1.0 / std::numbers::sqrt2;
    return PolState({0.0, r, -r, 0.0});
  }

  static PolState product(const PolVec& photon1, const PolVec& photon2) {
    const PolVec u = normalized(photon1);
    const PolVec v = normalized(photon2);
    return PolState({u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]});
  }

  const JointAmps& amplitudes() const { return a_; }

  /// |det| of the 2x2 coefficient matrix a[2i+j]: zero exactly for product
  /// states, 1/2 for maximally entangled ones.
  double product_defect() const { return std::abs(a_[0] * a_[3] - a_[1] * a_[2]); }

  bool is_product(double tol = 1e-10) const { return product_defect() <= tol; }

  /// Factor a product state as photon1 (x) photon2; the two vectors are
  /// determined up to opposite phases. Throws if the state is entangled.
  std::pair<PolVec, PolVec> factor_product(double tol = 1e-10) const {
    if (!is_product(tol))
      throw std::invalid_argument("cannot factor an entangled state into a product");
    // Rank-1 matrix: the dominant column is proportional to the photon-1
    // vector, the dominant row to the photon-2 vector.
    const double col0 = std::norm(a_[0]) + std::norm(a_[2]);
    const int j = (col0 >= 0.5) ? 0 : 1;
    const PolVec photon1 = normalized({a_[0 + j], a_[2 + j]});
    const double row0 = std::norm(a_[0]) + std::norm(a_[1]);
    const int i = (row0 >= 0.5) ? 0 : 2;
    const PolVec photon2 = normalized({a_[i + 0], a_[i + 1]});
    return {photon1, photon2};
  }

 private:
  explicit PolState(JointAmps a) : a_(a) {}
  JointAmps a_;
};

/// <s| op1 (x) op2 |s>. Hermiticity of the inputs is guaranteed by the
/// SinglePhotonOp constructor, so the result is real up to rounding.
inline double expectation(const PolState& s, const SinglePhotonOp& op1,
                          const SinglePhotonOp& op2) {
  const JointAmps& a = s.amplitudes();
  cplx acc = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          acc += std::conj(a[2 * i + j]) * op1.at(i, k) * op2.at(j, l) * a[2 * k + l];
  return acc.real();
}

/// Linear analyzer at angle theta: the detected axis is
/// cos(theta)|y> + sin(theta)|z>, the transmitted axis its orthogonal
/// complement. theta = 0 detects |y> (and passes |z>), theta = pi/2 detects
/// |z>, theta = pi/4 detects the diagonal (|y> + |z>)/sqrt(2).
class MeasurementBasis {
 public:
  explicit MeasurementBasis(double theta) : theta_(theta) {
    if (!std::isfinite(theta)) throw std::domain_error("analyzer angle must be finite");
  }

  double theta() const { return theta_; }

  PolVec detected() const { return {std::sin(theta_), std::cos(theta_)}; }
  PolVec transmitted() const { return {std::cos(theta_), -std::sin(theta_)}; }

  std::string detected_label() const { return axis_label(theta_); }
  std::string transmitted_label() const { return axis_label(theta_ + std::numbers::pi / 2.0); }

 private:
  static std::string axis_label(double angle) {
    const double pi = std::numbers::pi;
    double r = std::fmod(angle, pi);
    if (r < 0.0) r += pi;
    const double tol = 1e-9;
    if (r < tol || pi - r < tol) return "y";
    if (std::abs(r - pi / 2.0) < tol) return "z";
    if (std::abs(r - pi / 4.0) < tol) return "d+";
    if (std::abs(r - 3.0 * pi / 4.0) < tol) return "d-";
    return "lin(" + format_double(r) + ")";
  }

  double theta_;
};

/// The +/-1 observable realized by an analyzer: transmitted eigenvalue +1,
/// detected eigenvalue -1. At theta = 0 this is exactly sigma3.
inline SinglePhotonOp analyzer_operator(const MeasurementBasis& basis) {
  const PolVec t = basis.transmitted();
  const PolVec d = basis.detected();
  auto outer = [](const PolVec& v, int r, int c) { return v[r] * std::conj(v[c]); };
  return {outer(t, 0, 0) - outer(d, 0, 0), outer(t, 0, 1) - outer(d, 0, 1),
          outer(t, 1, 0) - outer(d, 1, 0), outer(t, 1, 1) - outer(d, 1, 1)};
}

namespace detail {

// Projection of the pair state onto `axis` for one photon, unnormalized.
inline JointAmps project_photon(const JointAmps& a, int photon, const PolVec& axis) {
  JointAmps out{};
  if (photon == 1) {
    for (int j = 0; j < 2; ++j) {
      const cplx overlap = std::conj(axis[0]) * a[0 + j] + std::conj(axis[1]) * a[2 + j];
      out[0 + j] = axis[0] * overlap;
      out[2 + j] = axis[1] * overlap;
    }
  } else if (photon == 2) {
    for (int i = 0; i < 2; ++i) {
      const cplx overlap = std::conj(axis[0]) * a[2 * i] + std::conj(axis[1]) * a[2 * i + 1];
      out[2 * i] = axis[0] * overlap;
      out[2 * i + 1] = axis[1] * overlap;
    }
  } else {
    throw std::domain_error("photon index must be 1 or 2");
  }
  return out;
}

}  // namespace detail

/// Born probability that the analyzer fires (detects) on the given photon.
inline double detection_probability(const PolState& s, int photon, const PolVec& detected_axis) {
  return norm_squared(detail::project_photon(s.amplitudes(), photon, normalized(detected_axis)));
}

inline double detection_probability(const PolState& s, int photon, const MeasurementBasis& basis) {
  return detection_probability(s, photon, basis.detected());
}

struct Outcome {
  bool fired;        // the analyzer's detector clicked
  int value;         // fired -> -1, transmitted -> +1 (analyzer_operator eigenvalues)
  PolState collapsed;
};

/// Projective measurement of one photon. Consumes exactly one uniform draw.
inline Outcome measure_photon(const PolState& s, int photon, const MeasurementBasis& basis,
                              Rng& rng) {
  const JointAmps proj = detail::project_photon(s.amplitudes(), photon, basis.detected());
  const double p = norm_squared(proj);
  bool fired = rng.uniform() < p;
  // Guard the certain branches against taking a zero-norm collapse.
  if (!fired && 1.0 - p < 1e-15) fired = true;
  if (fired && p < 1e-15) fired = false;
  if (fired) return {true, -1, PolState::from_amplitudes(proj)};
  const JointAmps& a = s.amplitudes();
  JointAmps rest{a[0] - proj[0], a[1] - proj[1], a[2] - proj[2], a[3] - proj[3]};
  return {false, +1, PolState::from_amplitudes(rest)};
}

struct OperatorOutcome {
  double eigenvalue;
  PolState collapsed;
};

/// Projective measurement of a Hermitian observable on one photon, resolved
/// through the closed-form eigensystem. Consumes exactly one uniform draw.
inline OperatorOutcome measure_operator(const PolState& s, int photon,
                                        const SinglePhotonOp& op, Rng& rng) {
  const EigenSystem2 es = eigensystem(op);
  if (es.plus.value - es.minus.value < 1e-14 * (1.0 + std::abs(es.plus.value))) {
    rng.uniform();  // keep the draw count independent of the operator
    return {es.plus.value, s};
  }
  const JointAmps proj = detail::project_photon(s.amplitudes(), photon, es.plus.vector);
  const double p = norm_squared(proj);
  bool plus = rng.uniform() < p;
  if (!plus && 1.0 - p < 1e-15) plus = true;
  if (plus && p < 1e-15) plus = false;
  if (plus) return {es.plus.value, PolState::from_amplitudes(proj)};
  const JointAmps& a = s.amplitudes();
  JointAmps rest{a[0] - proj[0], a[1] - proj[1], a[2] - proj[2], a[3] - proj[3]};
  return {es.minus.value, PolState::from_amplitudes(rest)};
}

/// S = E(a1,a2) + E(a1,b2) + E(b1,a2) - E(b1,b2). Station-1 observables are
/// a1, b1; station-2 observables a2, b2. Eigenvalues must lie in [-1, 1].
inline double chsh_value(const PolState& s, const SinglePhotonOp& a1, const SinglePhotonOp& b1,
                         const SinglePhotonOp& a2, const SinglePhotonOp& b2) {
  for (const SinglePhotonOp* op : {&a1, &b1, &a2, &b2}) {
    const EigenSystem2 es = eigensystem(*op);
    if (es.plus.value > 1.0 + 1e-9 || es.minus.value < -1.0 - 1e-9)
      throw std::invalid_argument("CHSH observables must have eigenvalues in [-1, 1]");
  }
  const double sv = expectation(s, a1, a2) + expectation(s, a1, b2) +
                    expectation(s, b1, a2) - expectation(s, b1, b2);
  if (std::abs(sv) > 2.0 * std::numbers::sqrt2 + 1e-9)
    throw std::logic_error("CHSH value exceeded the quantum bound; observables corrupt");
  return sv;
}

/// Polarization payloads are untouched by boosts along the propagation axis:
/// the transverse axes map onto the primed transverse axes one-to-one, so the
/// same component array describes the state in the new frame.
inline PolState frame_map(const PolState& s, const Boost&) { return s; }
inline SinglePhotonOp frame_map(const SinglePhotonOp& op, const Boost&) { return op; }
inline PolVec frame_map(const PolVec& v, const Boost&) { return v; }

}  // namespace relpair
