#include "plshoot/ivp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>

#include "detail/solve.hpp"
#include "plshoot/powers.hpp"

namespace plshoot {

void ProblemParams::validate() const {
  const auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!std::isfinite(p) || !(p > 1.0)) fail("p must be finite and > 1");
  if (!std::isfinite(N) || !(N > p)) fail("N must be finite and > p");
  if (!std::isfinite(lambda) || !(lambda > 0.0)) fail("lambda must be finite and > 0");
  if (!std::isfinite(r_max) || !(r_max > 0.0)) fail("r_max must be finite and > 0");
  if (!(tol.rel_tol > 0.0)) fail("rel_tol must be > 0");
  if (!(tol.abs_tol > 0.0)) fail("abs_tol must be > 0");
  if (!(tol.event_tol > 0.0)) fail("event_tol must be > 0");
  if (!(tol.double_zero_tol > 0.0)) fail("double_zero_tol must be > 0");
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::SimpleZero: return "SimpleZero";
    case EventKind::CriticalPoint: return "CriticalPoint";
    case EventKind::DoubleZero: return "DoubleZero";
    case EventKind::EnergyZeroCrossing: return "EnergyZeroCrossing";
  }
  return "?";
}

const char* to_string(StopReason s) {
  switch (s) {
    case StopReason::ReachedRmax: return "ReachedRmax";
    case StopReason::EnergyTrapped: return "EnergyTrapped";
    case StopReason::DoubleZero: return "DoubleZero";
    case StopReason::Diverged: return "Diverged";
  }
  return "?";
}

double energy(const PhaseState& s, const Nonlinearity& nl, double p) {
  // |u'|^p / q with u' = phi_q(v) is |v|^q / q.
  const double q = p / (p - 1.0);
  return std::pow(std::abs(s.v), q) / q + nl.F(s.u);
}

double weighted_energy(const PhaseState& s, const Nonlinearity& nl, double p, double N) {
  if (s.r == 0.0) return 0.0;
  const double q = p / (p - 1.0);
  return std::pow(s.r, q * (N - 1.0)) * energy(s, nl, p);
}

// ---------------------------------------------------------------------------
// Trajectory

Trajectory Trajectory::assemble(std::vector<Sample> samples, std::vector<Event> events,
                                StopReason stop, double N, double p, double lambda, double delta,
                                Nonlinearity nl) {
  if (samples.size() < 2) throw ContractError("trajectory needs at least two samples");
  if (samples.front().state.r != 0.0) throw ContractError("trajectory must start at r = 0");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].state.r > samples[i - 1].state.r)) {
      throw ContractError("trajectory radii must be strictly increasing");
    }
  }
  Trajectory t;
  t.samples_ = std::move(samples);
  t.events_ = std::move(events);
  t.stop_ = stop;
  t.N_ = N;
  t.p_ = p;
  t.lambda_ = lambda;
  t.delta_ = delta;
  t.nl_ = std::move(nl);
  return t;
}

namespace {

PhaseState hermite(const Sample& a, const Sample& b, double r) {
  const double h = b.state.r - a.state.r;
  const double t = (r - a.state.r) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  const double h22 = t2 * (1 - t) * (1 - t);
  return PhaseState{r, h00 * a.state.u + h10 * h * a.du + h01 * b.state.u + h11 * h * b.du + h22 * b.cu,
                    h00 * a.state.v + h10 * h * a.dv + h01 * b.state.v + h11 * h * b.dv + h22 * b.cv};
}

}  // namespace

PhaseState Trajectory::at(double r) const {
  if (!(r >= 0.0 && r <= r_end())) {
    std::ostringstream os;
    os << "dense output requested at r = " << r << " outside [0, " << r_end() << "]";
    throw DomainError(os.str());
  }
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), r,
                                   [](double x, const Sample& s) { return x < s.state.r; });
  std::size_t i = static_cast<std::size_t>(std::distance(samples_.begin(), it));
  i = std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, samples_.size() - 2);
  const Sample& a = samples_[i];
  const Sample& b = samples_[i + 1];
  if (r == b.state.r) return b.state;
  if (r == a.state.r) return a.state;
  if (i == 0 && delta_ > 0.0 && b.state.r == delta_) {
    // Second order in xi = r^q, matching the startup state at delta.
    const double q = p_ / (p_ - 1.0);
    const double Xi = std::pow(delta_, q);
    const double xi = std::pow(r, q);
    const double J0 = nl_.f(lambda_) / N_;
    const double Jd = -b.state.v / delta_;
    const double c1 = -phi(J0, q) / q;
    const double c2 = (b.state.u - lambda_ - c1 * Xi) / (Xi * Xi);
    return PhaseState{r, lambda_ + xi * (c1 + c2 * xi), -r * (J0 + (Jd - J0) * (xi / Xi))};
  }
  return hermite(a, b, r);
}

double Trajectory::energy_at(double r) const { return energy(at(r), nl_, p_); }

std::size_t Trajectory::count(EventKind kind, double r_limit) const {
  return static_cast<std::size_t>(std::count_if(events_.begin(), events_.end(), [&](const Event& e) {
    return e.kind == kind && e.r < r_limit;
  }));
}

std::optional<Event> Trajectory::first(EventKind kind) const {
  for (const auto& e : events_) {
    if (e.kind == kind) return e;
  }
  return std::nullopt;
}

double Trajectory::closest_approach() const {
  double best = std::numeric_limits<double>::infinity();
  const double q = p_ / (p_ - 1.0);
  for (const auto& e : events_) {
    if (e.kind == EventKind::EnergyZeroCrossing) continue;
    best = std::min(best, std::abs(e.state.u) + std::abs(phi(e.state.v, q)));
  }
  return best;
}

Trajectory Trajectory::with_zero_extension(double r_to) const {
  if (!(r_to > r_end())) throw ContractError("zero extension must end beyond the trajectory");
  Trajectory t = *this;
  t.extended_from_ = r_end();
  Sample& last = t.samples_.back();
  last.state.u = 0.0;
  last.state.v = 0.0;
  last.E = 0.0;
  last.du = 0.0;
  last.dv = 0.0;
  last.cu = 0.0;
  last.cv = 0.0;
  const double r0 = r_end();
  const int pieces = 16;
  for (int i = 1; i <= pieces; ++i) {
    Sample s;
    s.state.r = (i == pieces) ? r_to : r0 + (r_to - r0) * i / pieces;
    t.samples_.push_back(s);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Startup

double default_startup_delta(const ProblemParams& params, const Nonlinearity& nl) {
  const double q = params.p / (params.p - 1.0);
  const double fl = std::abs(nl.f(params.lambda));
  if (fl == 0.0) return 1e-3;
  const double d = std::pow(1e-6 * params.lambda * q * std::pow(params.N, q - 1.0) /
                                std::pow(fl, q - 1.0),
                            1.0 / q);
  return std::min(1e-3, d);
}

PhaseState startup(const ProblemParams& params, const Nonlinearity& nl, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("startup radius must be > 0");
  using GL = boost::math::quadrature::gauss<double, 20>;
  const double N = params.N;
  const double q = params.p / (params.p - 1.0);
  const double lambda = params.lambda;
  const double f_lambda = nl.f(lambda);

  // Chebyshev-Lobatto nodes in xi = r^q on [0, delta^q].
  constexpr int n = 17;
  const double Xi = std::pow(delta, q);
  std::array<double, n> x{};
  std::array<double, n> w{};
  std::array<double, n> U{};
  const double seed = (1.0 / q) * std::pow(std::abs(f_lambda) / N, q - 1.0) *
                      (f_lambda > 0 ? 1.0 : (f_lambda < 0 ? -1.0 : 0.0));
  for (int j = 0; j < n; ++j) {
    x[j] = 0.5 * Xi * (1.0 - std::cos(M_PI * j / (n - 1)));
    w[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == n - 1) ? 0.5 : 1.0);
    U[j] = lambda - seed * x[j];
  }
  const auto eval = [&](double xi) {
    double num = 0.0;
    double den = 0.0;
    for (int j = 0; j < n; ++j) {
      const double d = xi - x[j];
      if (d == 0.0) return U[j];
      const double c = w[j] / d;
      num += c * U[j];
      den += c;
    }
    return num / den;
  };
  const auto J = [&](double eta) {
    return GL::integrate([&](double t) { return std::pow(t, N - 1.0) * nl.f(eval(eta * std::pow(t, q))); },
                         0.0, 1.0);
  };

  const double tol = std::max(params.tol.abs_tol / 10.0, 8.0 * 2.220446049250313e-16 * lambda);
  std::array<double, n> next{};
  for (int iter = 0;; ++iter) {
    if (iter >= 100) {
      std::ostringstream os;
      os << "startup iteration did not contract within 100 iterations at delta = " << delta;
      throw StartupError(os.str());
    }
    double diff = 0.0;
    for (int j = 0; j < n; ++j) {
      const double xj = x[j];
      next[j] = lambda - (xj / q) * GL::integrate([&](double y) { return phi(J(xj * y), q); }, 0.0, 1.0);
      if (!std::isfinite(next[j])) throw StartupError("startup iteration produced a non-finite value");
      diff = std::max(diff, std::abs(next[j] - U[j]));
    }
    U = next;
    if (diff < tol) break;
  }
  return PhaseState{delta, U[n - 1], -delta * J(Xi)};
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

using Vec2 = std::array<double, 2>;

struct Rhs {
  double N;
  double q;
  const Nonlinearity* nl;

  Vec2 operator()(double r, const Vec2& y) const {
    return Vec2{signed_pow(y[1], q - 1.0), -(N - 1.0) * y[1] / r - nl->f(y[0])};
  }
};

struct Step {
  Vec2 y;
  Vec2 k7;  // right-hand side at the step end (first stage of the next step)
  Vec2 dense;  // quartic coefficient of the continuous extension
  double err;
};

// Local error per step is held to this fraction of the requested tolerance so
// that event radii move by < 10 event_tol when rel_tol is halved.
constexpr double kLocalFraction = 0.01;
// Step cap after a critical point, as a multiple of the distance to it.
constexpr double kCriticalGrowth = 1.0;

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

Step dopri_step(const Rhs& f, double r, const Vec2& y, const Vec2& k1, double h, const Tolerances& tol) {
  Vec2 t{};
  const auto stage = [&](auto&& combine) {
    for (int i = 0; i < 2; ++i) t[i] = y[i] + h * combine(i);
    return t;
  };
  const Vec2 k2 = f(r + c2 * h, stage([&](int i) { return a21 * k1[i]; }));
  const Vec2 k3 = f(r + c3 * h, stage([&](int i) { return a31 * k1[i] + a32 * k2[i]; }));
  const Vec2 k4 = f(r + c4 * h, stage([&](int i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; }));
  const Vec2 k5 = f(r + c5 * h, stage([&](int i) {
                      return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i];
                    }));
  const Vec2 k6 = f(r + h, stage([&](int i) {
                      return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
                    }));
  Step s{};
  for (int i = 0; i < 2; ++i) {
    s.y[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  }
  s.k7 = f(r + h, s.y);
  s.err = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * s.k7[i]);
    const double sc = kLocalFraction * (tol.abs_tol + tol.rel_tol * std::max(std::abs(y[i]), std::abs(s.y[i])));
    s.err = std::max(s.err, std::abs(e) / sc);
    s.dense[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * s.k7[i]);
  }
  if (!std::isfinite(s.y[0]) || !std::isfinite(s.y[1])) s.err = std::numeric_limits<double>::infinity();
  return s;
}

// State at r0 + s from a critical point (r0, u0, v = 0), two terms in s:
//   v = -f0 s + (N-1) f0 s^2 / (2 r0),
//   u = u0 + phi_q(-f0) [s^q / q - (q-1)(N-1) s^(q+1) / (2 r0 (q+1))].
// s is the longest of h, h/2, ... whose neglected terms fit the local error
// budget; empty when none does or when f0 = 0.
std::optional<std::pair<double, Vec2>> leave_critical_point(const Rhs& rhs, double r0, double u0, double h,
                                                            double r_max, const Tolerances& tol) {
  const double f0 = rhs.nl->f(u0);
  if (f0 == 0.0) return std::nullopt;
  const double q = rhs.q;
  const double N1 = rhs.N - 1.0;
  const double eta = 1e-6 * std::max(1.0, std::abs(u0));
  const double df = std::abs(rhs.nl->f(u0 + eta) - rhs.nl->f(u0 - eta)) / (2.0 * eta);
  const double af = std::abs(f0);
  const double lead = signed_pow(-f0, q - 1.0);
  double s = std::min(h, 0.5 * (r_max - r0));
  for (int i = 0; i < 60 && s > 16.0 * 2.220446049250313e-16 * r0; ++i, s *= 0.5) {
    const double v = -f0 * s + N1 * f0 * s * s / (2.0 * r0);
    const double u = u0 + lead * (std::pow(s, q) / q - (q - 1.0) * N1 * std::pow(s, q + 1.0) / (2.0 * r0 * (q + 1.0)));
    const double err_u = std::pow(af, q - 1.0) * std::pow(s, q + 2.0) / (r0 * r0) * N1 * N1 +
                         df * std::pow(af, 2.0 * q - 3.0) * std::pow(s, 2.0 * q);
    const double err_v = af * s * s * s / (r0 * r0) * N1 * N1 + df * std::pow(af, q - 1.0) * std::pow(s, q + 1.0);
    if (err_u <= kLocalFraction * (tol.abs_tol + tol.rel_tol * std::abs(u)) &&
        err_v <= kLocalFraction * (tol.abs_tol + tol.rel_tol * std::abs(v))) {
      return std::make_pair(r0 + s, Vec2{u, v});
    }
  }
  return std::nullopt;
}

bool crosses(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0) || (a != 0.0 && b == 0.0); }

}  // namespace

Trajectory integrate(const ProblemParams& params, const Nonlinearity& nl, const IntegrateOptions& opts) {
  params.validate();
  const double lambda = params.lambda;
  if (lambda < nl.domain_min() || lambda > nl.domain_max()) {
    throw DomainError("lambda lies outside the tabulated nonlinearity range");
  }
  const double N = params.N;
  const double p = params.p;
  const double q = p / (p - 1.0);
  const Tolerances& tol = params.tol;
  const double delta = opts.startup_delta.value_or(default_startup_delta(params, nl));
  if (!(delta < params.r_max)) throw ConfigError("r_max must exceed the startup radius");

  double bound = 0.0;
  if (opts.divergence_bound) {
    bound = *opts.divergence_bound;
  } else {
    double A = 0.0;
    if (const auto* pf = nl.power_family()) {
      A = std::pow(pf->s / pf->m, 1.0 / (pf->s - pf->m));
    } else {
      A = landmarks(nl, p, N).A;
    }
    bound = 10.0 * std::max(lambda, A);
  }

  const Rhs rhs{N, q, &nl};
  const auto make_sample = [&](double r, const Vec2& y, const Vec2& dy) {
    Sample s;
    s.state = PhaseState{r, y[0], y[1]};
    s.E = energy(s.state, nl, p);
    s.du = dy[0];
    s.dv = dy[1];
    return s;
  };

  std::vector<Sample> samples;
  std::vector<Event> events;
  samples.push_back(make_sample(0.0, Vec2{lambda, 0.0}, Vec2{0.0, -nl.f(lambda) / N}));

  const PhaseState s1 = startup(params, nl, delta);
  double r = delta;
  Vec2 y{s1.u, s1.v};
  Vec2 k1 = rhs(r, y);
  samples.push_back(make_sample(r, y, k1));

  StopReason stop = StopReason::ReachedRmax;
  bool energy_crossed = !(samples.front().E > 0.0);
  bool trap_pending = false;
  std::size_t zeros = 0;
  double h = delta;
  const double r_max = params.r_max;
  const double trap_level = -10.0 * tol.event_tol;
  std::size_t steps = 0;
  bool done = false;
  std::optional<double> r_crit;

  const auto finish = [&](StopReason why) {
    stop = why;
    done = true;
  };

  while (!done && r < r_max) {
    if (++steps > 50'000'000) throw IntegrationError("step budget exhausted", PhaseState{r, y[0], y[1]});
    // Steps grow at most geometrically away from the last critical point.
    if (r_crit) h = std::min(h, kCriticalGrowth * (r - *r_crit));
    const bool last = (r + h >= r_max);
    const double h_try = last ? r_max - r : h;
    Step st = dopri_step(rhs, r, y, k1, h_try, tol);
    const double fac = st.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(st.err, -0.2), 0.2, 5.0);
    if (st.err > 1.0) {
      h = h_try * fac;
      if (h < 16.0 * 2.220446049250313e-16 * r) {
        throw IntegrationError("step size underflow", PhaseState{r, y[0], y[1]});
      }
      continue;
    }

    // Anchor the step end on the earliest sign change of u or v.
    double h_used = h_try;
    int anchored = -1;  // component snapped to zero
    for (int c = 0; c < 2; ++c) {
      if (!crosses(y[c], st.y[c])) continue;
      double hc = h_try;
      if (st.y[c] != 0.0) {
        const auto g = [&](double hh) { return dopri_step(rhs, r, y, k1, hh, tol).y[c]; };
        hc = detail::bracketed_root(g, 0.0, h_try, y[c], st.y[c]);
      }
      if (anchored < 0 || hc < h_used) {
        h_used = hc;
        anchored = c;
      }
    }
    if (anchored >= 0 && h_used < h_try) st = dopri_step(rhs, r, y, k1, h_used, tol);
    const double r_new = (h_used == h_try && last) ? r_max : r + h_used;
    if (!(r_new > r)) throw IntegrationError("step size underflow at event", PhaseState{r, y[0], y[1]});
    Vec2 y_new = st.y;
    Vec2 k_new = st.k7;
    if (anchored >= 0) {
      y_new[anchored] = 0.0;
      k_new = rhs(r_new, y_new);
    }
    const Sample prev = samples.back();
    samples.push_back(make_sample(r_new, y_new, k_new));
    samples.back().cu = st.dense[0];
    samples.back().cv = st.dense[1];
    const Sample& cur = samples.back();
    r = r_new;
    y = y_new;
    k1 = k_new;
    h = (anchored >= 0) ? std::max(h_used, h_try * std::min(fac, 1.0)) : h_try * fac;
    if (last && anchored < 0) h = std::max(h, h_try);

    if (!energy_crossed && prev.E > 0.0 && cur.E <= 0.0) {
      energy_crossed = true;
      const auto g = [&](double rr) { return energy(hermite(prev, cur, rr), nl, p); };
      double rc = cur.state.r;
      if (cur.E < 0.0) rc = detail::bracketed_root(g, prev.state.r, cur.state.r, prev.E, cur.E);
      const PhaseState sc = hermite(prev, cur, rc);
      events.push_back(Event{EventKind::EnergyZeroCrossing, rc, sc, energy(sc, nl, p)});
    }

    if (anchored == 0) {
      const double slope = std::abs(phi(y[1], q));
      if (opts.stop_at_double_zero && slope <= tol.double_zero_tol && cur.E <= tol.event_tol) {
        events.push_back(Event{EventKind::DoubleZero, r, cur.state, cur.E});
        finish(StopReason::DoubleZero);
        break;
      }
      events.push_back(Event{EventKind::SimpleZero, r, cur.state, cur.E});
      if (++zeros > opts.max_zeros) {
        throw IntegrationError("zero count exceeded the configured cap", cur.state);
      }
    } else if (anchored == 1) {
      if (opts.stop_at_double_zero && std::abs(y[0]) <= tol.double_zero_tol && cur.E <= tol.event_tol) {
        events.push_back(Event{EventKind::DoubleZero, r, cur.state, cur.E});
        finish(StopReason::DoubleZero);
        break;
      }
      events.push_back(Event{EventKind::CriticalPoint, r, cur.state, cur.E});
      if (trap_pending) {
        finish(StopReason::EnergyTrapped);
        break;
      }
    }

    if (opts.stop_on_trap && cur.E < trap_level) trap_pending = true;
    if (std::abs(y[0]) > bound) {
      finish(StopReason::Diverged);
      break;
    }

    // For q < 2, u' = phi_q(v) is not smooth at v = 0 and a Runge-Kutta step
    // leaving a critical point is of reduced order. Leave it on the local
    // series instead.
    if (anchored == 1 && q < 2.0) {
      r_crit = r;
      if (const auto kick = leave_critical_point(rhs, r, y[0], h, r_max, tol)) {
        r = kick->first;
        y = kick->second;
        k1 = rhs(r, y);
        samples.push_back(make_sample(r, y, k1));
        if (opts.stop_on_trap && samples.back().E < trap_level) trap_pending = true;
      }
    }
  }

  return Trajectory::assemble(std::move(samples), std::move(events), stop, N, p, lambda, delta, nl);
}

}  // namespace plshoot
