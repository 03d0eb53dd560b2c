#pragma once

// Reference computations that share no numerical code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/numeric/odeint.hpp>

namespace plshoot::testing {

inline double sgnpow(double x, double e) { return x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), e), x); }

/// Half period of x' = -phi_q(y), y' = phi_p(x) from x = 1, y = 0: twice the
/// first time x reaches 0, by Fehlberg 7(8) with step bisection at the crossing.
inline double oracle_half_period(double p, double tol = 1e-14) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;
  const double q = p / (p - 1.0);
  const auto rhs = [&](const State& s, State& d, double) {
    d[0] = -sgnpow(s[1], q - 1.0);
    d[1] = sgnpow(s[0], p - 1.0);
  };
  ode::runge_kutta_fehlberg78<State> stepper;
  State s{1.0, 0.0};
  double t = 0.0;
  // Steps graded toward t = 0, where phi_q(y) is not smooth; bisect the
  // step that crosses x = 0.
  for (;;) {
    const double h = std::min(1e-3, std::max(1e-14, 0.05 * t));
    State next = s;
    stepper.do_step(rhs, next, t, h);
    if (next[0] <= 0.0) {
      double lo = 0.0;
      double hi = h;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        State trial = s;
        const int pieces = 4;
        for (int i = 0; i < pieces; ++i) stepper.do_step(rhs, trial, t + mid * i / pieces, mid / pieces);
        (trial[0] > 0.0 ? lo : hi) = mid;
      }
      return 2.0 * (t + 0.5 * (lo + hi));
    }
    s = next;
    t += h;
  }
}

/// u at the requested radii for u' = phi_q(v), v' = -(N-1) v / r - f(u),
/// u(0) = lambda, started from the two-term series at r_start.
inline std::vector<double> oracle_u(double N, double p, double lambda, const std::function<double(double)>& f,
                                    const std::vector<double>& radii, double abs_tol, double rel_tol,
                                    double r_start = 1e-5) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;
  const double q = p / (p - 1.0);
  const double c = f(lambda) / N;
  State s{lambda - sgnpow(c, q - 1.0) * std::pow(r_start, q) / q, -c * r_start};
  const auto rhs = [&](const State& y, State& d, double r) {
    d[0] = sgnpow(y[1], q - 1.0);
    d[1] = -(N - 1.0) * y[1] / r - f(y[0]);
  };
  std::vector<double> out;
  std::vector<double> times;
  times.push_back(r_start);
  for (double r : radii) {
    if (r > r_start) times.push_back(r);
  }
  auto stepper = ode::make_controlled(abs_tol, rel_tol, ode::runge_kutta_fehlberg78<State>());
  std::vector<double> values;
  ode::integrate_times(stepper, rhs, s, times.begin(), times.end(), 1e-6,
                       [&](const State& y, double) { values.push_back(y[0]); });
  std::size_t j = 1;
  for (double r : radii) out.push_back(r > r_start ? values[j++] : lambda);
  return out;
}

/// Root of g on [lo, hi] by plain bisection; g(lo), g(hi) of opposite sign.
inline double bisect(const std::function<double(double)>& g, double lo, double hi) {
  double glo = g(lo);
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& g, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += g(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace plshoot::testing
