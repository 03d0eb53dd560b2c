#pragma once

#include "plshoot/powers.hpp"

namespace plshoot {

/// Generalized polar coordinates of a phase point: rho = p[Phi_p(u) + Phi_q(v)].
/// theta is unwrapped in trajectory traces; single conversions return it in
/// [0, 2 pi_p).
struct PolarState {
  double rho = 0.0;
  double theta = 0.0;
};

struct SinCos {
  double sin = 0.0;
  double cos = 0.0;
};

struct Cartesian {
  double u = 0.0;
  double v = 0.0;
};

/// pi_p: half the period of x' = -phi_q(y), y' = phi_p(x), x(0) = 1, y(0) = 0,
/// by adaptive quadrature of the time needed for x to reach 0.
double half_period(PExponent p);

/// Generalized trigonometry for one exponent pair (p, q).
///
/// sin_q and cos_q are the y and x components of the auxiliary oscillator
/// above. On the first quarter period the time along the orbit is an
/// incomplete Beta integral in w = (p/q)|y|^q, so both directions (time to
/// point and point to time) are evaluated through the regularized incomplete
/// Beta function and its inverse. The other three quarters follow from the
/// reflection symmetries of the oscillator.
///
/// Immutable after construction.
class PTrig {
 public:
  explicit PTrig(PExponent p);

  const PExponent& exponent() const noexcept { return exp_; }
  double p() const noexcept { return exp_.p(); }
  double q() const noexcept { return exp_.q(); }

  /// pi_p.
  double half_period() const noexcept { return 2.0 * quarter_; }
  /// Largest value of sin_q, reached at pi_p / 2.
  double sin_max() const noexcept { return y_max_; }

  /// (sin_q t, cos_q t) for any finite t.
  SinCos sincos(double t) const;

  Cartesian polar_to_cartesian(PolarState s) const;
  /// theta in [0, 2 pi_p); (0, 0) maps to rho = 0, theta = 0.
  PolarState cartesian_to_polar(double u, double v) const;

  /// rho = p [Phi_p(u) + Phi_q(v)].
  double rho(double u, double v) const;

 private:
  // Quarter-period point for a reduced time tau in [0, quarter_].
  SinCos quarter_point(double tau) const;
  // Reduced time on the first quarter for |x|, |y| on the unit orbit,
  // supplied through w = p Phi_q(y) and c = 1 - w = p Phi_p(x).
  double quarter_time(double w, double c) const;

  PExponent exp_;
  double quarter_;
  double y_max_;
};

}  // namespace plshoot
