#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plshoot/ivp.hpp"
#include "plshoot/model.hpp"

namespace plshoot {

enum class ShootKind { Ak, Ik, Undetermined };
const char* to_string(ShootKind k);

struct ShootClass {
  ShootKind kind = ShootKind::Undetermined;
  double lambda = 0.0;
  int k = 0;  // SimpleZero count
  /// First radius where the energy reaches 0; +inf if it never does.
  double r_energy_zero = 0.0;
  std::optional<double> r_support;  // Ik only
  /// Continuation through a critical point at an interior maximum of F is
  /// not unique; such shots never enter a bracket.
  bool non_unique_risk = false;
  double closest_approach = 0.0;
  std::string note;
  std::shared_ptr<const Trajectory> trajectory;  // null below A
};

/// params.lambda is ignored; lambda is the shot.
ShootClass classify(double lambda, const ProblemParams& params, const Nonlinearity& nl,
                    const IntegrateOptions& opts = {});

struct SweepRow {
  ShootClass cls;
  /// Node count differs by 2 or more from the previous row.
  bool needs_refinement = false;
};

struct SweepOptions {
  /// Insert midpoints between rows whose node counts jump by 2 or more.
  bool refine = false;
  int max_refinements = 40;
  IntegrateOptions integrate;
};

/// lambda_grid must be strictly increasing.
std::vector<SweepRow> sweep(const std::vector<double>& lambda_grid, const ProblemParams& params,
                            const Nonlinearity& nl, const SweepOptions& opts = {});

struct NodeSolution {
  int k = 0;
  double lambda_k = 0.0;
  double bracket_lo = 0.0;  // <= k zeros
  double bracket_hi = 0.0;  // >= k + 1 zeros
  double r_support = 0.0;
  /// No double zero within tolerance was met; lambda_k is the bracket
  /// midpoint and closest_approach the best |u| + |u'| seen.
  bool near_Ik = false;
  double closest_approach = 0.0;
  double E_support = 0.0;
  int bisection_steps = 0;
  bool extended = false;
  std::string note;
  std::shared_ptr<const Trajectory> trajectory;
};

struct SearchOptions {
  /// Relative bracket width at which plain bisection stops.
  double lambda_tol_rel = 1e-10;
  /// Keep halving past lambda_tol, down to floating-point resolution, while
  /// no endpoint meets the double-zero tolerance.
  bool continue_past_tol = true;
  double grid_ratio = 1.1;
  double lambda_cap_factor = 1e6;
};

/// Throws SearchError if no bracket exists below lambda_cap_factor * A.
NodeSolution find_lambda_k(int k, const ProblemParams& params, const Nonlinearity& nl,
                           const SearchOptions& opts = {});

/// Appends the zero branch on (r_support, r_to]. ContractError unless the
/// solution ends in a double zero with E <= event_tol.
NodeSolution extend_compact_support(const NodeSolution& sol, double r_to, double event_tol = 1e-10);

struct AsymptoticReport {
  double r_from = 0.0;
  double r_to = 0.0;
  double u_tail = 0.0;
  double E_tail = 0.0;
  /// Nearest zero of f to u_tail (0 included); empty when suppressed.
  std::optional<double> ell;
  double residual_u = 0.0;
  double residual_E = 0.0;
  std::string note;
};

/// Tail averages over [r_end / 10, r_end].
AsymptoticReport asymptotic_limit(const Trajectory& traj, const Nonlinearity& nl);

}  // namespace plshoot
