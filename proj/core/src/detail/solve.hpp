#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace plshoot::detail {

/// Root of g in [lo, hi], which must bracket a sign change.
template <class G>
double bracketed_root(G&& g, double lo, double hi, double g_lo, double g_hi) {
  if (g_lo == 0.0) return lo;
  if (g_hi == 0.0) return hi;
  std::uintmax_t iters = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto r = boost::math::tools::toms748_solve(g, lo, hi, g_lo, g_hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

template <class G>
double bracketed_root(G&& g, double lo, double hi) {
  return bracketed_root(g, lo, hi, g(lo), g(hi));
}

/// Minimizer of g on [lo, hi]: dense grid scan, then Brent around the best
/// grid cell. Returns (argmin, min).
template <class G>
std::pair<double, double> grid_minimize(G&& g, double lo, double hi, int n = 4001) {
  double best_x = lo;
  double best_g = g(lo);
  int best_i = 0;
  const double h = (hi - lo) / (n - 1);
  for (int i = 1; i < n; ++i) {
    const double x = (i == n - 1) ? hi : lo + i * h;
    const double gx = g(x);
    if (gx < best_g) {
      best_g = gx;
      best_x = x;
      best_i = i;
    }
  }
  const double a = lo + std::max(best_i - 1, 0) * h;
  const double b = std::min(lo + (best_i + 1) * h, hi);
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima(g, a, b, 52, iters);
  if (r.second < best_g) return {r.first, r.second};
  return {best_x, best_g};
}

/// n log-spaced points in [lo, hi], lo > 0.
inline std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i / (n - 1));
  out.back() = hi;
  return out;
}

}  // namespace plshoot::detail
