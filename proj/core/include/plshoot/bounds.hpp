#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plshoot/ivp.hpp"
#include "plshoot/model.hpp"
#include "plshoot/shoot.hpp"

namespace plshoot {

struct BarrierOptions {
  /// Gauss-Legendre panels on the regularized variable.
  int panels = 64;
};

/// One-dimensional compact-support profile. u_bar falls from a at r = 0 to 0
/// at r = A_time along (1/q)|u_bar'|^p + F(u_bar) = 0; B_time is the same
/// time for the reflected nonlinearity -f(-s) on (0, -b).
class BarrierProfile {
 public:
  double A_time() const noexcept { return A_time_; }
  double B_time() const noexcept { return B_time_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  /// Exponent k of the substitution s = a t^k.
  double substitution_exponent() const noexcept { return k_; }

  /// r in [0, A_time]; DomainError outside.
  double u_bar(double r) const;
  /// -[q(-F(u_bar))]^{1/p}.
  double u_bar_prime(double r) const;
  /// (r_j, u_bar(r_j)) at panel boundaries, r increasing.
  const std::vector<std::pair<double, double>>& nodes() const noexcept { return nodes_; }

 private:
  friend BarrierProfile barrier(const Nonlinearity&, double, double, double, const BarrierOptions&);

  Nonlinearity nl_;
  double p_ = 2.0;
  double a_ = 0.0;
  double b_ = 0.0;
  double k_ = 1.0;
  double A_time_ = 0.0;
  double B_time_ = 0.0;
  std::vector<double> tau_;  // panel boundaries in t
  std::vector<double> cum_;  // integral from t = 0 to tau_[j]
  std::vector<std::pair<double, double>> nodes_;
};

/// Throws BarrierError when F is not negative on (b, a) minus 0 or when
/// |F|^{-1/p} is not integrable at 0.
BarrierProfile barrier(const Nonlinearity& nl, double p, double b, double a,
                       const BarrierOptions& opts = {});
BarrierProfile barrier(const Nonlinearity& nl, double p, const BarrierOptions& opts = {});

struct SupportCheck {
  bool conclusive = false;
  bool pass = false;
  double R = 0.0;      // b < u < a on (R, r_support)
  double bound = 0.0;  // R + max(A_time, B_time)
  double r_support = 0.0;
  double margin = 0.0;  // bound - r_support
  double max_u_beyond = 0.0;
  std::string note;
};

/// With R unset, R is the last exit of u from (b, a) before the support end.
SupportCheck support_upper_check(const NodeSolution& sol, const BarrierProfile& bar,
                                 std::optional<double> R = std::nullopt, double tol = 1e-7);

struct SizeBounds {
  double lambda = 0.0;
  double theta_growth = 0.0;
  double S_lo = 0.0;
  double S_hi = 0.0;
  double r_support_lo = 0.0;
  /// r_support_lo / growth^{(N-p)/(p(N-1))}.
  double C = 0.0;
  /// lambda^{N(p-1)/(N-p)} / f(lambda).
  double growth = 0.0;
  /// F(theta lambda) / (lambda f(lambda)).
  double h6_ratio = 0.0;
  double F_bar = 0.0;
  std::string formula;
  std::string note;
};

/// DomainError when f(theta lambda) <= 0.
SizeBounds size_bounds(double lambda, double theta_growth, const Nonlinearity& nl, double p, double N);

/// 4 r_support_lo(lambda_ref) + 10 max(A_time, B_time); the first term is
/// dropped where the size bounds are undefined.
double default_r_max(const Nonlinearity& nl, double p, double N, double lambda_ref,
                     double theta_growth, const BarrierProfile& bar);

/// First radius where u falls to level (u(0) above level); empty if never.
std::optional<double> first_level_radius(const Trajectory& traj, double level);

struct BoundReport {
  double lambda = 0.0;
  double S_lo = 0.0;
  std::optional<double> S_measured;
  double S_hi = 0.0;
  double r_support_lo = 0.0;
  std::optional<double> r_support_measured;
  bool pass = false;
};

/// One-sided checks S_lo <= S <= S_hi and r_support >= r_support_lo.
BoundReport bound_report(const SizeBounds& sb, const Trajectory& traj,
                         std::optional<double> r_support_measured = std::nullopt);

struct ProbeRow {
  double lambda = 0.0;
  double min_E = 0.0;
  double min_rho = 0.0;
  bool increased = false;  // min_E above the previous row's
  bool rho_certified = false;
  int nodes = 0;            // zeros in (0, R]
  int node_lower_bound = 0;  // floor(omega (R - r0) / pi_p) - 1 when certified
  StopReason stop = StopReason::ReachedRmax;
};

/// Minimum energy and rho over [0, R] per lambda. With a certificate, rows
/// whose min rho clears sigma0^p get the rotation node bound.
std::vector<ProbeRow> energy_growth_probe(double R, const std::vector<double>& lambdas,
                                          const ProblemParams& params, const Nonlinearity& nl,
                                          const std::optional<RotationCertificate>& cert = std::nullopt);

}  // namespace plshoot
