#pragma once

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace plshoot {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b]. Integrands must be bounded on
/// the closed interval; callers remove endpoint singularities by substitution.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-13,
                                    unsigned max_depth = 30) {
  QuadratureResult out;
  out.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, max_depth, rel_tol, &out.error);
  return out;
}

/// Fixed-order Gauss-Legendre rule on [a, b] (10 nodes, exact for degree 19).
template <class F>
double gauss_legendre10(F&& f, double a, double b) {
  static constexpr double x[5] = {0.1488743389816312108848260, 0.4333953941292471907992659,
                                  0.6794095682990244062343274, 0.8650633666889845107320967,
                                  0.9739065285171717200779640};
  static constexpr double w[5] = {0.2955242247147528701738930, 0.2692667193099963550912269,
                                  0.2190863625159820439955349, 0.1494513491505805931457763,
                                  0.0666713443086881375935688};
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    sum += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
  }
  return sum * half;
}

}  // namespace plshoot
