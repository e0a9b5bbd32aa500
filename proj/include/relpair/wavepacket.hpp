#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "relpair/errors.hpp"
#include "relpair/kinematics.hpp"
#include "relpair/text.hpp"

// Gaussian photon wavepackets in natural units (hbar = c = 1): momentum-space
// amplitudes, position-space fields by quadrature of
//   psi(x, t) = (2 pi)^(-1/2) Integral psi(p) e^{i(px - |p| t)} dp,
// light-speed propagation, and the Doppler map p -> gamma(p - beta E).

namespace relpair {

/// Unit-norm Gaussian momentum amplitude centered at p0 with width sigma_p.
/// The support is required to be effectively sign-definite (|p0| >= 6
/// sigma_p): the |p| kernel then acts like a one-branch translation, which is
/// what makes rigid propagation a testable property. The quadrature itself
/// keeps the full |p| kernel and never assumes the sign.
struct MomentumAmplitude {
  double p0;
  double sigma_p;

  MomentumAmplitude(double p0_, double sigma_p_) : p0(p0_), sigma_p(sigma_p_) {
    if (!std::isfinite(p0) || !std::isfinite(sigma_p) || sigma_p <= 0.0)
      throw std::domain_error("momentum amplitude needs finite p0 and sigma_p > 0");
    if (std::abs(p0) < 6.0 * sigma_p)
      throw std::domain_error("momentum support must be sign-definite: |p0| >= 6 sigma_p");
  }

  int direction() const { return p0 > 0.0 ? 1 : -1; }

  /// Real Gaussian with unit L2 norm: (2 pi sigma^2)^(-1/4) e^{-(p-p0)^2/(4 sigma^2)}.
  double amplitude(double p) const {
    const double d = p - p0;
    return std::pow(2.0 * std::numbers::pi * sigma_p * sigma_p, -0.25) *
           std::exp(-d * d / (4.0 * sigma_p * sigma_p));
  }
};

/// A momentum amplitude carrying accumulated free evolution: each component
/// is multiplied by e^{-i |p| phase_time}.
struct MomentumWave {
  MomentumAmplitude shape;
  double phase_time = 0.0;

  std::complex<double> amplitude(double p) const {
    return std::polar(shape.amplitude(p), -std::abs(p) * phase_time);
  }
};

/// Attach free evolution by t: multiplies each momentum component by
/// e^{-i|p|t}. Commutes with position_wavefunction (evolving first and
/// transforming at 0 equals transforming at t).
inline MomentumWave evolve_phase(const MomentumAmplitude& m, double t) { return {m, t}; }
inline MomentumWave evolve_phase(const MomentumWave& w, double t) {
  return {w.shape, w.phase_time + t};
}

/// Uniform sample positions x0 + i*dx, i in [0, n).
struct Grid {
  double x0;
  double dx;
  std::size_t n;

  static Grid over(double x_min, double x_max, std::size_t points) {
    if (points < 2 || !(x_max > x_min))
      throw std::domain_error("grid needs x_max > x_min and at least 2 points");
    return {x_min, (x_max - x_min) / static_cast<double>(points - 1), points};
  }

  double at(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }
  double front() const { return x0; }
  double back() const { return at(n - 1); }
};

/// Complex position-space samples of one photon at a fixed time.
struct PositionField {
  Grid grid;
  std::vector<std::complex<double>> values;
  double t = 0.0;

  double norm_squared() const {
    double acc = 0.0;
    for (const auto& v : values) acc += std::norm(v);
    return acc * grid.dx;
  }

  double norm() const { return std::sqrt(norm_squared()); }
};

/// Independent-photon product state: the joint spatial amplitude is
/// packet1.values[i] * packet2.values[j], and free evolution acts on each
/// factor separately, so the factorization survives propagation.
struct JointSpatialState {
  PositionField packet1;
  PositionField packet2;

  std::complex<double> value(std::size_t i, std::size_t j) const {
    return packet1.values[i] * packet2.values[j];
  }
};

/// Momentum window and sample count for the position-space quadrature.
/// Midpoint rule over p0 +/- half_width_sigmas * sigma_p.
struct Quadrature {
  double half_width_sigmas = 8.0;
  std::size_t samples = 2048;
};

/// Eq.-style position wavefunction by midpoint quadrature. The grid must
/// resolve the fastest oscillation (AliasingError when sigma_p * dx > 0.1)
/// and be wide enough that the envelope has decayed at its ends.
inline PositionField position_wavefunction(const MomentumWave& w, const Grid& grid, double t,
                                           const Quadrature& q = {}) {
  if (w.shape.sigma_p * grid.dx > 0.1)
    throw AliasingError("grid spacing too coarse for momentum width: sigma_p * dx > 0.1");
  if (q.samples < 2) throw std::domain_error("quadrature needs at least 2 samples");

  const double width = q.half_width_sigmas * w.shape.sigma_p;
  const double lo = w.shape.p0 - width;
  const double dp = 2.0 * width / static_cast<double>(q.samples);

  std::vector<double> pk(q.samples), ak(q.samples);
  for (std::size_t k = 0; k < q.samples; ++k) {
    pk[k] = lo + (static_cast<double>(k) + 0.5) * dp;
    ak[k] = w.shape.amplitude(pk[k]);
  }

  const double t_total = t + w.phase_time;
  const double scale = dp / std::sqrt(2.0 * std::numbers::pi);
  PositionField f{grid, std::vector<std::complex<double>>(grid.n), t};
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.at(i);
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < q.samples; ++k)
      acc += ak[k] * std::polar(1.0, pk[k] * x - std::abs(pk[k]) * t_total);
    f.values[i] = acc * scale;
  }

  // Guard the "envelope decayed at the boundary" precondition after the
  // fact: a packet running off the grid corrupts norms silently otherwise.
  double peak = 0.0;
  for (const auto& v : f.values) peak = std::max(peak, std::abs(v));
  const double edge = std::max(std::abs(f.values.front()), std::abs(f.values.back()));
  if (peak <= 0.0 || edge > 1e-6 * peak)
    throw GeometryError("position grid does not contain the packet: boundary amplitude too large");
  return f;
}

inline PositionField position_wavefunction(const MomentumAmplitude& m, const Grid& grid, double t,
                                           const Quadrature& q = {}) {
  return position_wavefunction(MomentumWave{m, 0.0}, grid, t, q);
}

/// Momentum scale factor gamma(1 - beta * direction) picked up by a photon
/// under a boost; equal to sqrt((1-beta)/(1+beta)) for a right-mover and its
/// reciprocal for a left-mover.
inline double doppler_factor(const Boost& b, int direction) {
  if (direction != 1 && direction != -1)
    throw std::domain_error("photon direction must be +1 or -1");
  return b.gamma() * (1.0 - b.beta() * static_cast<double>(direction));
}

/// Lorentz map of the packet into the boosted frame: each component moves as
/// p -> gamma(p - beta |p|), which for sign-definite support rescales both
/// p0 and sigma_p by the Doppler factor. Re-parameterizing the Gaussian this
/// way absorbs the Jacobian dp/dp', so the transformed amplitude is again
/// unit-norm.
inline MomentumAmplitude doppler_transform(const MomentumAmplitude& m, const Boost& b) {
  const double k = doppler_factor(b, m.direction());
  return MomentumAmplitude(k * m.p0, k * m.sigma_p);
}

/// Both sides of the invariant p x - E t = p' x' - E' t' for an on-shell
/// photon component; the caller compares them. Rejects off-shell input.
inline std::pair<double, double> invariant_phase_check(double p, double E, double x, double ct,
                                                       const Boost& b) {
  if (std::abs(E - std::abs(p)) > 1e-9 * std::max(1.0, std::abs(p)))
    throw std::domain_error("invariant phase check expects an on-shell photon: E = |p|");
  const double lhs = p * x - E * ct;
  const double pp = b.gamma() * (p - b.beta() * E);
  const double Ep = b.gamma() * (E - b.beta() * p);
  const Event moved = boost_event(Event(x, ct), b);
  const double rhs = pp * moved.x - Ep * moved.ct;
  return {lhs, rhs};
}

/// Probability mass of the field inside [detector_x - half_width,
/// detector_x + half_width], by per-cell clipping of the Riemann cells.
/// The window must lie inside the sampled grid.
inline double detector_overlap(const PositionField& f, double detector_x, double half_width) {
  if (half_width < 0.0 || !std::isfinite(detector_x) || !std::isfinite(half_width))
    throw std::domain_error("detector window needs finite center and half_width >= 0");
  const double wlo = detector_x - half_width;
  const double whi = detector_x + half_width;
  if (wlo < f.grid.front() || whi > f.grid.back())
    throw GeometryError("detector window extends outside the sampled grid");
  if (half_width == 0.0) return 0.0;

  double acc = 0.0;
  const double half_dx = 0.5 * f.grid.dx;
  for (std::size_t i = 0; i < f.grid.n; ++i) {
    const double clo = std::max(f.grid.at(i) - half_dx, wlo);
    const double chi = std::min(f.grid.at(i) + half_dx, whi);
    if (chi > clo) acc += std::norm(f.values[i]) * (chi - clo);
  }
  return std::clamp(acc, 0.0, 1.0);
}

/// CSV export of a field, one row per sample: x, re, im, abs2.
inline void write_position_field_csv(const PositionField& f, std::ostream& os) {
  os << "x,re,im,abs2\n";
  for (std::size_t i = 0; i < f.grid.n; ++i) {
    os << format_double(f.grid.at(i)) << ',' << format_double(f.values[i].real()) << ','
       << format_double(f.values[i].imag()) << ',' << format_double(std::norm(f.values[i]))
       << '\n';
  }
}

}  // namespace relpair
