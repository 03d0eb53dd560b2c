#include "plshoot/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "detail/solve.hpp"
#include "plshoot/polar.hpp"
#include "plshoot/powers.hpp"
#include "plshoot/ptrig.hpp"
#include "plshoot/quadrature.hpp"

namespace plshoot {

namespace {

// Power of -F near 0 on the side `sign`.
double small_amplitude_exponent(const Nonlinearity& nl, double sign, double scale) {
  if (const auto* pf = nl.power_family()) return pf->m;
  const double e = 1e-4 * scale;
  const double g1 = -nl.F(sign * e);
  const double g2 = -nl.F(sign * 2.0 * e);
  if (!(g1 > 0.0) || !(g2 > 0.0)) throw BarrierError("F is not negative next to 0");
  return std::log(g2 / g1) / std::log(2.0);
}

struct HalfBarrier {
  double k = 1.0;
  std::vector<double> tau;
  std::vector<double> cum;
  double total = 0.0;
};

// Integral of ds / [q(-F(sign s))]^{1/p} on (0, a) after s = a t^k.
template <class G>
HalfBarrier half_barrier(const G& minus_F, double p, double a, double alpha, int panels) {
  if (!(alpha < p)) {
    std::ostringstream os;
    os << "|F|^(-1/p) is not integrable at 0: small-amplitude exponent " << alpha << " >= p = " << p;
    throw BarrierError(os.str());
  }
  const double q = p / (p - 1.0);
  HalfBarrier hb;
  hb.k = p / (p - alpha);
  const double k = hb.k;
  const auto integrand = [&](double t) {
    const double s = a * std::pow(t, k);
    const double g = minus_F(s);
    if (!(g > 0.0)) {
      std::ostringstream os;
      os << "F(" << s << ") >= 0 inside the barrier interval";
      throw BarrierError(os.str());
    }
    return a * k * std::pow(t, k - 1.0) / std::pow(q * g, 1.0 / p);
  };
  hb.tau.resize(static_cast<std::size_t>(panels) + 1);
  hb.cum.assign(hb.tau.size(), 0.0);
  for (int j = 0; j <= panels; ++j) hb.tau[static_cast<std::size_t>(j)] = static_cast<double>(j) / panels;
  for (std::size_t j = 1; j < hb.tau.size(); ++j) {
    hb.cum[j] = hb.cum[j - 1] + gauss_legendre10(integrand, hb.tau[j - 1], hb.tau[j]);
  }
  hb.total = hb.cum.back();
  if (!std::isfinite(hb.total)) throw BarrierError("barrier quadrature diverged");
  return hb;
}

}  // namespace

BarrierProfile barrier(const Nonlinearity& nl, double p, double b, double a, const BarrierOptions& opts) {
  if (!(p > 1.0)) throw DomainError("barrier needs p > 1");
  if (!(a > 0.0) || !(b < 0.0)) throw DomainError("barrier needs b < 0 < a");
  if (opts.panels < 1) throw ConfigError("barrier needs at least one panel");

  BarrierProfile out;
  out.nl_ = nl;
  out.p_ = p;
  out.a_ = a;
  out.b_ = b;

  const double alpha_a = small_amplitude_exponent(nl, 1.0, a);
  const double alpha_b = small_amplitude_exponent(nl, -1.0, -b);
  const HalfBarrier ha = half_barrier([&](double s) { return -nl.F(s); }, p, a, alpha_a, opts.panels);
  const HalfBarrier hb = half_barrier([&](double s) { return -nl.F(-s); }, p, -b, alpha_b, opts.panels);
  out.k_ = ha.k;
  out.A_time_ = ha.total;
  out.B_time_ = hb.total;
  out.tau_ = ha.tau;
  out.cum_ = ha.cum;

  // r = A_time - cum(t) at u = a t^k; store increasing in r.
  out.nodes_.reserve(ha.tau.size());
  for (std::size_t j = ha.tau.size(); j-- > 0;) {
    const double r = (j == ha.tau.size() - 1) ? 0.0 : ha.total - ha.cum[j];
    const double u = (j == 0) ? 0.0 : a * std::pow(ha.tau[j], ha.k);
    out.nodes_.emplace_back(r, u);
  }
  out.nodes_.back().first = ha.total;
  return out;
}

BarrierProfile barrier(const Nonlinearity& nl, double p, const BarrierOptions& opts) {
  const auto [b, a] = monotonicity_interval(nl);
  return barrier(nl, p, b, a, opts);
}

double BarrierProfile::u_bar(double r) const {
  if (!(r >= 0.0 && r <= A_time_)) {
    std::ostringstream os;
    os << "barrier profile requested at r = " << r << " outside [0, " << A_time_ << "]";
    throw DomainError(os.str());
  }
  if (r == 0.0) return a_;
  if (r == A_time_) return 0.0;
  const double target = A_time_ - r;  // integral from t = 0 to t(r)
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
  const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()), cum_.size() - 1);
  const double t0 = tau_[j - 1];
  const double t1 = tau_[j];
  const double q = p_ / (p_ - 1.0);
  const auto integrand = [&](double t) {
    const double s = a_ * std::pow(t, k_);
    return a_ * k_ * std::pow(t, k_ - 1.0) / std::pow(q * -nl_.F(s), 1.0 / p_);
  };
  const double base = cum_[j - 1];
  const auto g = [&](double t) { return base + gauss_legendre10(integrand, t0, t) - target; };
  const double t = detail::bracketed_root(g, t0, t1, base - target, cum_[j] - target);
  return a_ * std::pow(t, k_);
}

double BarrierProfile::u_bar_prime(double r) const {
  const double u = u_bar(r);
  if (u <= 0.0) return 0.0;
  const double q = p_ / (p_ - 1.0);
  return -std::pow(q * std::max(-nl_.F(u), 0.0), 1.0 / p_);
}

// ---------------------------------------------------------------------------

namespace {

// Largest radius below r_lim where u leaves (b, a), refined on dense output.
std::optional<double> last_exit(const Trajectory& traj, double b, double a, double r_lim) {
  const auto& S = traj.samples();
  const auto outside = [&](double u) { return !(u > b && u < a); };
  std::size_t last = S.size();
  for (std::size_t i = 0; i < S.size() && S[i].state.r < r_lim; ++i) {
    if (outside(S[i].state.u)) last = i;
  }
  if (last == S.size()) return std::nullopt;
  if (last + 1 >= S.size()) return S[last].state.r;
  const double u0 = S[last].state.u;
  const double level = (u0 >= a) ? a : b;
  const auto g = [&](double r) { return traj.at(r).u - level; };
  const double r0 = S[last].state.r;
  const double r1 = S[last + 1].state.r;
  const double g0 = u0 - level;
  const double g1 = S[last + 1].state.u - level;
  if (g0 == 0.0 || (g0 > 0.0) == (g1 > 0.0)) return r0;
  return detail::bracketed_root(g, r0, r1, g0, g1);
}

double max_abs_u_beyond(const Trajectory& traj, double r_from) {
  const auto& S = traj.samples();
  double m = 0.0;
  if (r_from <= traj.r_end()) m = std::abs(traj.at(r_from).u);
  for (std::size_t i = 1; i < S.size(); ++i) {
    const double r0 = S[i - 1].state.r;
    const double r1 = S[i].state.r;
    if (r1 <= r_from) continue;
    const double lo = std::max(r0, r_from);
    for (int j = 1; j <= 8; ++j) m = std::max(m, std::abs(traj.at(lo + (r1 - lo) * j / 8.0).u));
  }
  return m;
}

}  // namespace

SupportCheck support_upper_check(const NodeSolution& sol, const BarrierProfile& bar,
                                 std::optional<double> R, double tol) {
  SupportCheck rep;
  if (!sol.trajectory) {
    rep.note = "no trajectory";
    return rep;
  }
  const Trajectory* traj = sol.trajectory.get();
  double r_support = 0.0;
  if (traj->zero_extended()) {
    r_support = *traj->zero_extended_from();
  } else if (traj->stop_reason() == StopReason::DoubleZero && !sol.near_Ik) {
    r_support = traj->events().back().r;
  } else {
    rep.note = std::string("solution does not tend to 0 (stopped as ") + to_string(traj->stop_reason()) +
               "): lemma hypothesis fails";
    return rep;
  }
  rep.r_support = r_support;

  if (R) {
    rep.R = *R;
  } else {
    const auto exit = last_exit(*traj, bar.b(), bar.a(), r_support);
    if (!exit) {
      rep.note = "u never leaves (b, a): no valid R before r_support";
      return rep;
    }
    rep.R = *exit;
  }
  rep.bound = rep.R + std::max(bar.A_time(), bar.B_time());
  rep.margin = rep.bound - r_support;

  std::optional<Trajectory> extended;
  if (!traj->zero_extended() || traj->r_end() < rep.bound) {
    extended = traj->with_zero_extension(std::max(rep.bound, r_support) * 1.1 + 1.0);
    traj = &*extended;
  }
  rep.max_u_beyond = max_abs_u_beyond(*traj, rep.bound);
  rep.conclusive = true;
  rep.pass = rep.margin > 0.0 && rep.max_u_beyond <= tol;
  if (!rep.pass) {
    std::ostringstream os;
    os << "u does not vanish beyond R + max(A, B) = " << rep.bound << " (max |u| = " << rep.max_u_beyond << ")";
    rep.note = os.str();
  }
  return rep;
}

// ---------------------------------------------------------------------------

SizeBounds size_bounds(double lambda, double theta_growth, const Nonlinearity& nl, double p, double N) {
  if (!(theta_growth > 0.0 && theta_growth < 1.0)) throw DomainError("theta_growth must lie in (0, 1)");
  if (!(p > 1.0 && p < N)) throw DomainError("size bounds need 1 < p < N");
  const double q = p / (p - 1.0);
  const double tl = theta_growth * lambda;
  const double f_hi = nl.f(lambda);
  const double f_lo = nl.f(tl);
  if (!(f_lo > 0.0) || !(f_hi > 0.0)) {
    std::ostringstream os;
    os << "f(theta lambda) = " << f_lo << " <= 0: lambda = " << lambda << " too small";
    throw DomainError(os.str());
  }
  const double F_tl = nl.F(tl);
  if (!(F_tl > 0.0)) {
    std::ostringstream os;
    os << "F(theta lambda) = " << F_tl << " <= 0: lambda = " << lambda << " too small";
    throw DomainError(os.str());
  }

  SizeBounds sb;
  sb.lambda = lambda;
  sb.theta_growth = theta_growth;
  const double head = std::pow(N, q - 1.0) * q * (1.0 - theta_growth) * lambda;
  sb.S_lo = std::pow(head / std::pow(f_hi, q - 1.0), 1.0 / q);
  sb.S_hi = std::pow(head / std::pow(f_lo, q - 1.0), 1.0 / q);
  sb.F_bar = landmarks(nl, p, N).F_bar;
  sb.r_support_lo = sb.S_lo * std::pow(F_tl / sb.F_bar, 1.0 / (q * (N - 1.0)));
  sb.h6_ratio = F_tl / (lambda * f_hi);
  sb.growth = std::pow(lambda, N * (p - 1.0) / (N - p)) / f_hi;
  sb.C = sb.r_support_lo / std::pow(sb.growth, (N - p) / (p * (N - 1.0)));

  std::ostringstream os;
  os.precision(17);
  os << "r_support_lo = S_lo * (F(theta lambda) / F_bar)^(1/(q (N-1))), S_lo^q = N^(q-1) q (1-theta) lambda / "
        "f(lambda)^(q-1); theta = "
     << theta_growth << ", q = " << q << ", F(theta lambda) = " << F_tl << ", F_bar = " << sb.F_bar
     << ", f(lambda) = " << f_hi << ", F(theta lambda)/(lambda f(lambda)) = " << sb.h6_ratio;
  sb.formula = os.str();
  return sb;
}

double default_r_max(const Nonlinearity& nl, double p, double N, double lambda_ref, double theta_growth,
                     const BarrierProfile& bar) {
  double lo = 0.0;
  try {
    lo = size_bounds(lambda_ref, theta_growth, nl, p, N).r_support_lo;
  } catch (const DomainError&) {
  }
  return 4.0 * lo + 10.0 * std::max(bar.A_time(), bar.B_time());
}

std::optional<double> first_level_radius(const Trajectory& traj, double level) {
  const auto& S = traj.samples();
  if (!(S.front().state.u > level)) return std::nullopt;
  for (std::size_t i = 1; i < S.size(); ++i) {
    const double u1 = S[i].state.u;
    if (u1 > level) continue;
    const double u0 = S[i - 1].state.u;
    if (u1 == level) return S[i].state.r;
    return detail::bracketed_root([&](double r) { return traj.at(r).u - level; }, S[i - 1].state.r,
                                  S[i].state.r, u0 - level, u1 - level);
  }
  return std::nullopt;
}

BoundReport bound_report(const SizeBounds& sb, const Trajectory& traj, std::optional<double> r_support_measured) {
  BoundReport rep;
  rep.lambda = sb.lambda;
  rep.S_lo = sb.S_lo;
  rep.S_hi = sb.S_hi;
  rep.r_support_lo = sb.r_support_lo;
  rep.S_measured = first_level_radius(traj, sb.theta_growth * sb.lambda);
  rep.r_support_measured = r_support_measured;
  rep.pass = rep.S_measured && *rep.S_measured >= sb.S_lo && *rep.S_measured <= sb.S_hi;
  if (r_support_measured) rep.pass = rep.pass && *r_support_measured >= sb.r_support_lo;
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<ProbeRow> energy_growth_probe(double R, const std::vector<double>& lambdas,
                                          const ProblemParams& params, const Nonlinearity& nl,
                                          const std::optional<RotationCertificate>& cert) {
  if (!(R > 0.0)) throw DomainError("probe radius must be positive");
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > lambdas[i - 1])) throw ConfigError("probe lambdas must be strictly increasing");
  }
  const double pi_p = half_period(PExponent(params.p));
  IntegrateOptions io;
  io.stop_on_trap = false;
  io.max_zeros = 1000000;

  std::vector<ProbeRow> rows;
  rows.reserve(lambdas.size());
  for (double lam : lambdas) {
    ProblemParams pp = params;
    pp.lambda = lam;
    pp.r_max = R;
    const Trajectory traj = integrate(pp, nl, io);
    ProbeRow row;
    row.lambda = lam;
    row.stop = traj.stop_reason();
    row.min_E = std::numeric_limits<double>::infinity();
    row.min_rho = std::numeric_limits<double>::infinity();
    const double q = params.p / (params.p - 1.0);
    for (const Sample& s : traj.samples()) {
      row.min_E = std::min(row.min_E, s.E);
      row.min_rho = std::min(row.min_rho, std::pow(std::abs(s.state.u), params.p) + params.p * Phi(s.state.v, q));
    }
    row.nodes = static_cast<int>(traj.count(EventKind::SimpleZero, std::nextafter(R, 2.0 * R)));
    if (!rows.empty()) row.increased = row.min_E > rows.back().min_E;
    if (cert && traj.r_end() >= R) {
      row.rho_certified = row.min_rho >= std::pow(cert->sigma0, params.p);
      if (row.rho_certified) {
        row.node_lower_bound = static_cast<int>(std::floor(cert->omega * (R - cert->r0) / pi_p)) - 1;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace plshoot
