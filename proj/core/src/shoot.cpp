#include "plshoot/shoot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plshoot/powers.hpp"
#include "plshoot/quadrature.hpp"

namespace plshoot {

const char* to_string(ShootKind k) {
  switch (k) {
    case ShootKind::Ak: return "Ak";
    case ShootKind::Ik: return "Ik";
    case ShootKind::Undetermined: return "Undetermined";
  }
  return "?";
}

namespace {

double positive_F_zero(const Nonlinearity& nl, double p, double N) {
  if (const auto* pf = nl.power_family()) return std::pow(pf->s / pf->m, 1.0 / (pf->s - pf->m));
  return landmarks(nl, p, N).A;
}

}  // namespace

ShootClass classify(double lambda, const ProblemParams& params, const Nonlinearity& nl,
                    const IntegrateOptions& opts) {
  ShootClass c;
  c.lambda = lambda;
  const double A = positive_F_zero(nl, params.p, params.N);
  if (lambda < A) {
    c.kind = ShootKind::Undetermined;
    c.r_energy_zero = 0.0;
    c.closest_approach = std::numeric_limits<double>::infinity();
    c.note = "lambda below A: E(0) = F(lambda) < 0, shot is node-free";
    return c;
  }
  ProblemParams pp = params;
  pp.lambda = lambda;
  auto traj = std::make_shared<const Trajectory>(integrate(pp, nl, opts));
  c.trajectory = traj;
  c.k = static_cast<int>(traj->count(EventKind::SimpleZero));
  c.closest_approach = traj->closest_approach();

  c.r_energy_zero = std::numeric_limits<double>::infinity();
  if (const auto ez = traj->first(EventKind::EnergyZeroCrossing)) {
    c.r_energy_zero = ez->r;
  } else if (const auto dz = traj->first(EventKind::DoubleZero)) {
    c.r_energy_zero = dz->r;
  }

  if (nl.is_tabulated()) {
    const auto maxima = interior_F_maxima(nl);
    for (const auto& e : traj->events()) {
      if (e.kind != EventKind::CriticalPoint) continue;
      for (double x0 : maxima) {
        if (std::abs(e.state.u - x0) <= 1e-6 * std::max(1.0, std::abs(x0))) c.non_unique_risk = true;
      }
    }
    if (c.non_unique_risk) c.note = "critical point at an interior maximum of F: continuation not unique";
  }

  switch (traj->stop_reason()) {
    case StopReason::EnergyTrapped:
      c.kind = ShootKind::Ak;
      break;
    case StopReason::DoubleZero: {
      const Event& last = traj->events().back();
      if (last.E <= params.tol.event_tol) {
        c.kind = ShootKind::Ik;
        c.r_support = last.r;
      } else {
        c.kind = ShootKind::Undetermined;
        c.note = "double zero with positive energy";
      }
      break;
    }
    case StopReason::ReachedRmax:
      c.kind = ShootKind::Undetermined;
      c.note = "reached r_max before the energy trapped the solution";
      break;
    case StopReason::Diverged:
      c.kind = ShootKind::Undetermined;
      c.note = "diverged: |u| exceeded the a priori bound";
      break;
  }
  return c;
}

std::vector<SweepRow> sweep(const std::vector<double>& lambda_grid, const ProblemParams& params,
                            const Nonlinearity& nl, const SweepOptions& opts) {
  for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > lambda_grid[i - 1])) throw ConfigError("lambda grid must be strictly increasing");
  }
  std::vector<SweepRow> rows;
  rows.reserve(lambda_grid.size());
  for (double lam : lambda_grid) rows.push_back(SweepRow{classify(lam, params, nl, opts.integrate), false});

  const auto defined = [](const ShootClass& c) { return c.kind != ShootKind::Undetermined; };
  const auto flag = [&]() {
    bool any = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].needs_refinement = false;
      if (i == 0 || !defined(rows[i].cls) || !defined(rows[i - 1].cls)) continue;
      if (std::abs(rows[i].cls.k - rows[i - 1].cls.k) >= 2) {
        rows[i].needs_refinement = true;
        any = true;
      }
    }
    return any;
  };

  bool pending = flag();
  for (int round = 0; opts.refine && pending && round < opts.max_refinements; ++round) {
    std::vector<SweepRow> next;
    next.reserve(rows.size() * 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].needs_refinement) {
        const double mid = 0.5 * (rows[i - 1].cls.lambda + rows[i].cls.lambda);
        if (mid > rows[i - 1].cls.lambda && mid < rows[i].cls.lambda) {
          next.push_back(SweepRow{classify(mid, params, nl, opts.integrate), false});
        }
      }
      next.push_back(rows[i]);
    }
    rows = std::move(next);
    pending = flag();
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Node search

NodeSolution find_lambda_k(int k, const ProblemParams& params, const Nonlinearity& nl,
                           const SearchOptions& opts) {
  if (k < 0) throw ConfigError("node count k must be >= 0");
  if (!(opts.grid_ratio > 1.0)) throw ConfigError("grid ratio must be > 1");
  const double A = positive_F_zero(nl, params.p, params.N);
  const double cap = opts.lambda_cap_factor * A;

  IntegrateOptions side;
  side.stop_at_double_zero = false;
  IntegrateOptions detect;

  const auto usable = [](const ShootClass& c) { return c.kind == ShootKind::Ak && !c.non_unique_risk; };

  // Seed a bracket on the geometric grid A * ratio^j.
  std::optional<double> lo;
  std::optional<double> hi;
  int skipped = 0;
  for (double lam = A * opts.grid_ratio; lam <= cap; lam *= opts.grid_ratio) {
    const ShootClass c = classify(lam, params, nl, side);
    if (!usable(c)) {
      ++skipped;
      continue;
    }
    if (c.k <= k) {
      lo = lam;
    } else {
      hi = lam;
      break;
    }
  }
  if (!hi) {
    std::ostringstream os;
    os << "no shot with more than " << k << " nodes below lambda_cap = " << cap << " (" << skipped
       << " grid shots unclassified; r_max = " << params.r_max << ")";
    throw SearchError(os.str());
  }
  if (!lo) {
    // Every grid shot already exceeds k; approach A from above.
    double gap = *hi - A;
    for (int i = 0; i < 200 && !lo; ++i) {
      gap *= 0.5;
      const ShootClass c = classify(A + gap, params, nl, side);
      if (usable(c) && c.k <= k) lo = A + gap;
    }
    if (!lo) throw SearchError("no shot with at most k nodes found above A");
  }

  NodeSolution sol;
  sol.k = k;
  double a = *lo;
  double b = *hi;
  std::optional<ShootClass> found;

  const auto try_endpoints = [&]() -> bool {
    for (double lam : {a, b}) {
      ShootClass c = classify(lam, params, nl, detect);
      if (c.kind == ShootKind::Ik && c.k == k) {
        if (!found || c.closest_approach < found->closest_approach) found = std::move(c);
      }
    }
    return found.has_value();
  };

  for (;;) {
    const bool tol_met = (b - a) < opts.lambda_tol_rel * a;
    if (tol_met) {
      if (!opts.continue_past_tol || try_endpoints()) break;
    }
    const double mid = a + 0.5 * (b - a);
    if (!(mid > a && mid < b)) {
      try_endpoints();
      break;
    }
    const ShootClass c = classify(mid, params, nl, side);
    ++sol.bisection_steps;
    if (c.kind == ShootKind::Undetermined || c.non_unique_risk) {
      std::ostringstream os;
      os << "bisection shot at lambda = " << mid << " is unusable (" << c.note << ")";
      throw SearchError(os.str());
    }
    (c.k <= k ? a : b) = mid;
  }
  sol.bracket_lo = a;
  sol.bracket_hi = b;

  if (found) {
    sol.lambda_k = found->lambda;
    sol.r_support = *found->r_support;
    sol.closest_approach = found->closest_approach;
    sol.E_support = found->trajectory->events().back().E;
    sol.trajectory = found->trajectory;
    return sol;
  }

  // Near-Ik report: best approach among the bracket endpoints and midpoint.
  sol.near_Ik = true;
  sol.lambda_k = a + 0.5 * (b - a);
  double best = std::numeric_limits<double>::infinity();
  const double q = params.p / (params.p - 1.0);
  for (double lam : {a, sol.lambda_k, b}) {
    const ShootClass c = classify(lam, params, nl, detect);
    if (lam == sol.lambda_k) sol.trajectory = c.trajectory;
    for (const auto& e : c.trajectory->events()) {
      if (e.kind == EventKind::EnergyZeroCrossing) continue;
      const double gap = std::abs(e.state.u) + std::abs(phi(e.state.v, q));
      if (gap < best) {
        best = gap;
        sol.r_support = e.r;
        sol.E_support = e.E;
      }
    }
  }
  sol.closest_approach = best;
  sol.note = "double-zero tolerance not met; lambda_k is the bracket midpoint";
  return sol;
}

NodeSolution extend_compact_support(const NodeSolution& sol, double r_to, double event_tol) {
  if (!sol.trajectory || sol.trajectory->stop_reason() != StopReason::DoubleZero) {
    throw ContractError("compact-support extension needs a solution ending in a double zero");
  }
  const Event& last = sol.trajectory->events().back();
  if (last.kind != EventKind::DoubleZero || last.E > event_tol) {
    throw ContractError("compact-support extension needs E <= event_tol at the double zero");
  }
  NodeSolution out = sol;
  out.trajectory = std::make_shared<const Trajectory>(sol.trajectory->with_zero_extension(r_to));
  out.extended = true;
  out.note = "zero branch selected beyond r_support (continuation past a double zero is not unique)";
  return out;
}

AsymptoticReport asymptotic_limit(const Trajectory& traj, const Nonlinearity& nl) {
  AsymptoticReport rep;
  rep.r_to = traj.r_end();
  rep.r_from = rep.r_to / 10.0;
  const auto& S = traj.samples();
  double iu = 0.0;
  double iE = 0.0;
  for (std::size_t i = 1; i < S.size(); ++i) {
    const double a = std::max(S[i - 1].state.r, rep.r_from);
    const double b = S[i].state.r;
    if (b <= a) continue;
    iu += gauss_legendre10([&](double r) { return traj.at(r).u; }, a, b);
    iE += gauss_legendre10([&](double r) { return traj.energy_at(r); }, a, b);
  }
  const double width = rep.r_to - rep.r_from;
  rep.u_tail = iu / width;
  rep.E_tail = iE / width;

  const StopReason stop = traj.stop_reason();
  if (traj.zero_extended() || stop == StopReason::DoubleZero) {
    rep.note = "compact support: zero branch, limit report suppressed";
    return rep;
  }
  if (stop != StopReason::EnergyTrapped && stop != StopReason::ReachedRmax) {
    rep.note = std::string("trajectory stopped as ") + to_string(stop) + "; tail is not asymptotic";
  }
  std::vector<double> zeros = nonzero_zeros(nl);
  zeros.push_back(0.0);
  double ell = zeros.front();
  for (double z : zeros) {
    if (std::abs(z - rep.u_tail) < std::abs(ell - rep.u_tail)) ell = z;
  }
  rep.ell = ell;
  rep.residual_u = std::abs(rep.u_tail - ell);
  rep.residual_E = std::abs(rep.E_tail - nl.F(ell));
  return rep;
}

}  // namespace plshoot
