#include "plshoot/ptrig.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace plshoot {

double half_period(PExponent pe) {
  const double p = pe.p();
  const double q = pe.q();
  // Split the quarter orbit at x^p = 1/2: before it parametrize by y (x stays
  // away from 0), after it by x (y stays away from 0). Both integrands are
  // bounded but only Hoelder at 0 (y^q, x^p), which tanh-sinh absorbs.
  const double y_max = std::pow(q / p, 1.0 / q);
  const double y_split = y_max * std::pow(0.5, 1.0 / q);
  const double x_split = std::pow(0.5, 1.0 / p);

  const auto by_y = [p, q](double y) {
    return 1.0 / std::pow(1.0 - (p / q) * std::pow(y, q), 1.0 / q);
  };
  const auto by_x = [p, q](double x) {
    return 1.0 / std::pow((q / p) * (1.0 - std::pow(x, p)), 1.0 / p);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double quarter = ts.integrate(by_y, 0.0, y_split) + ts.integrate(by_x, 0.0, x_split);
  return 2.0 * quarter;
}

PTrig::PTrig(PExponent p)
    : exp_(p), quarter_(0.5 * plshoot::half_period(p)), y_max_(std::pow(p.q() / p.p(), 1.0 / p.q())) {}

double PTrig::rho(double u, double v) const {
  return std::pow(std::abs(u), p()) + (p() / q()) * std::pow(std::abs(v), q());
}

SinCos PTrig::quarter_point(double tau) const {
  const double a = 1.0 / q();
  const double b = 1.0 / p();
  tau = std::clamp(tau, 0.0, quarter_);
  const double frac = tau / quarter_;
  double w = 0.0;
  double c = 1.0;
  // Invert on whichever half keeps the small variable accurate.
  if (frac <= 0.5) {
    w = boost::math::ibeta_inv(a, b, frac, &c);
  } else {
    c = boost::math::ibeta_inv(b, a, (quarter_ - tau) / quarter_, &w);
  }
  return SinCos{y_max_ * std::pow(w, a), std::pow(c, b)};
}

double PTrig::quarter_time(double w, double c) const {
  const double a = 1.0 / q();
  const double b = 1.0 / p();
  if (w <= 0.5) return quarter_ * boost::math::ibeta(a, b, w);
  return quarter_ - quarter_ * boost::math::ibeta(b, a, c);
}

SinCos PTrig::sincos(double t) const {
  if (!std::isfinite(t)) throw DomainError("sincos_q: argument must be finite");
  const double period = 4.0 * quarter_;
  double r = std::fmod(t, period);
  if (r < 0.0) r += period;
  const int quadrant = std::clamp(static_cast<int>(r / quarter_), 0, 3);
  const double tau = r - quadrant * quarter_;
  switch (quadrant) {
    case 0: {
      return quarter_point(tau);
    }
    case 1: {
      const SinCos s = quarter_point(quarter_ - tau);
      return SinCos{s.sin, -s.cos};
    }
    case 2: {
      const SinCos s = quarter_point(tau);
      return SinCos{-s.sin, -s.cos};
    }
    default: {
      const SinCos s = quarter_point(quarter_ - tau);
      return SinCos{-s.sin, s.cos};
    }
  }
}

Cartesian PTrig::polar_to_cartesian(PolarState s) const {
  if (!(s.rho >= 0.0)) throw DomainError("polar_to_cartesian: rho must be >= 0");
  const SinCos sc = sincos(s.theta);
  return Cartesian{std::pow(s.rho, 1.0 / p()) * sc.cos, std::pow(s.rho, 1.0 / q()) * sc.sin};
}

PolarState PTrig::cartesian_to_polar(double u, double v) const {
  const double pu = std::pow(std::abs(u), p());
  const double qv = (p() / q()) * std::pow(std::abs(v), q());
  const double r = pu + qv;
  if (r == 0.0) return PolarState{0.0, 0.0};
  const double tau = quarter_time(qv / r, pu / r);
  double theta = 0.0;
  if (u >= 0.0 && v >= 0.0) {
    theta = tau;
  } else if (u < 0.0 && v >= 0.0) {
    theta = 2.0 * quarter_ - tau;
  } else if (u <= 0.0) {
    theta = 2.0 * quarter_ + tau;
  } else {
    theta = 4.0 * quarter_ - tau;
  }
  if (theta >= 4.0 * quarter_) theta -= 4.0 * quarter_;
  return PolarState{r, theta};
}

}  // namespace plshoot
