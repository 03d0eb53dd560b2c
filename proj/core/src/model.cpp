#include "plshoot/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include "detail/solve.hpp"
#include "plshoot/error.hpp"
#include "plshoot/powers.hpp"

namespace plshoot {

struct Nonlinearity::Table {
  std::vector<double> u;
  std::vector<double> f;
  std::vector<double> d;     // Fritsch-Carlson slopes
  std::vector<double> cum;   // integral of the interpolant from u[0] to u[i]
  double F_shift = 0.0;      // integral from u[0] to 0

  std::size_t interval(double x) const {
    if (x < u.front() || x > u.back()) {
      std::ostringstream os;
      os << "tabulated nonlinearity evaluated at " << x << " outside [" << u.front() << ", "
         << u.back() << "]";
      throw DomainError(os.str());
    }
    const auto it = std::upper_bound(u.begin(), u.end(), x);
    const auto i = static_cast<std::size_t>(std::distance(u.begin(), it));
    return std::min(i == 0 ? 0 : i - 1, u.size() - 2);
  }

  double eval(double x) const {
    const std::size_t i = interval(x);
    const double h = u[i + 1] - u[i];
    const double t = (x - u[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f[i] + (t3 - 2 * t2 + t) * h * d[i] +
           (-2 * t3 + 3 * t2) * f[i + 1] + (t3 - t2) * h * d[i + 1];
  }

  // Integral of the Hermite piece on [u[i], u[i] + t h].
  double piece_integral(std::size_t i, double t) const {
    const double h = u[i + 1] - u[i];
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double t4 = t3 * t;
    return h * ((t - t3 + 0.5 * t4) * f[i] + (0.25 * t4 - 2.0 * t3 / 3.0 + 0.5 * t2) * h * d[i] +
                (t3 - 0.5 * t4) * f[i + 1] + (0.25 * t4 - t3 / 3.0) * h * d[i + 1]);
  }

  double primitive_from_start(double x) const {
    const std::size_t i = interval(x);
    return cum[i] + piece_integral(i, (x - u[i]) / (u[i + 1] - u[i]));
  }
};

Nonlinearity Nonlinearity::power(double m, double s) {
  Nonlinearity nl;
  nl.impl_ = PowerFamily{m, s};
  return nl;
}

Nonlinearity Nonlinearity::tabulated(std::vector<double> u, std::vector<double> f) {
  if (u.size() != f.size()) throw ConfigError("tabulated nonlinearity: column lengths differ");
  if (u.size() < 4) throw ConfigError("tabulated nonlinearity: need at least 4 rows");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i]) || !std::isfinite(f[i])) {
      throw ConfigError("tabulated nonlinearity: non-finite entry");
    }
    if (i > 0 && !(u[i] > u[i - 1])) {
      throw ConfigError("tabulated nonlinearity: u must be strictly increasing");
    }
  }
  if (!(u.front() < 0.0 && u.back() > 0.0)) {
    throw ConfigError("tabulated nonlinearity: table must straddle u = 0");
  }

  auto t = std::make_shared<Table>();
  const std::size_t n = u.size();
  std::vector<double> h(n - 1);
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = u[i + 1] - u[i];
    secant[i] = (f[i + 1] - f[i]) / h[i];
  }
  t->d.assign(n, 0.0);
  t->d.front() = secant.front();
  t->d.back() = secant.back();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (secant[k - 1] * secant[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    t->d[k] = (w1 + w2) / (w1 / secant[k - 1] + w2 / secant[k]);
  }
  t->u = std::move(u);
  t->f = std::move(f);
  t->cum.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) t->cum[i + 1] = t->cum[i] + t->piece_integral(i, 1.0);
  t->F_shift = t->primitive_from_start(0.0);

  Nonlinearity nl;
  nl.impl_ = std::shared_ptr<const Table>(std::move(t));
  return nl;
}

double Nonlinearity::f(double u) const {
  if (const auto* pf = power_family()) {
    const double a = std::abs(u);
    if (a == 0.0) return 0.0;
    const double mag = std::pow(a, pf->s - 1.0) - std::pow(a, pf->m - 1.0);
    return u > 0.0 ? mag : -mag;
  }
  return std::get<std::shared_ptr<const Table>>(impl_)->eval(u);
}

double Nonlinearity::F(double u) const {
  if (const auto* pf = power_family()) {
    const double a = std::abs(u);
    return std::pow(a, pf->s) / pf->s - std::pow(a, pf->m) / pf->m;
  }
  const auto& t = *std::get<std::shared_ptr<const Table>>(impl_);
  return t.primitive_from_start(u) - t.F_shift;
}

double Nonlinearity::domain_min() const noexcept {
  if (power_family()) return -std::numeric_limits<double>::infinity();
  return std::get<std::shared_ptr<const Table>>(impl_)->u.front();
}

double Nonlinearity::domain_max() const noexcept {
  if (power_family()) return std::numeric_limits<double>::infinity();
  return std::get<std::shared_ptr<const Table>>(impl_)->u.back();
}

const std::vector<double>& Nonlinearity::nodes() const noexcept {
  static const std::vector<double> empty;
  if (power_family()) return empty;
  return std::get<std::shared_ptr<const Table>>(impl_)->u;
}

std::string Nonlinearity::describe() const {
  std::ostringstream os;
  if (const auto* pf = power_family()) {
    os << "f(u) = |u|^" << (pf->s - 2.0) << " u - |u|^" << (pf->m - 2.0) << " u (m=" << pf->m
       << ", s=" << pf->s << ")";
  } else {
    os << "tabulated f on [" << domain_min() << ", " << domain_max() << "] with " << nodes().size()
       << " nodes";
  }
  return os.str();
}

Nonlinearity make_power_family(double m, double s, double p, double N) {
  if (!std::isfinite(m) || !std::isfinite(s) || !std::isfinite(p) || !std::isfinite(N)) {
    throw ConfigError("power family: exponents and dimension must be finite");
  }
  if (!(N > p)) throw ConfigError("power family: requires N > p");
  if (!(1.0 < m)) throw ConfigError("power family: requires 1 < m");
  if (!(m < p)) throw ConfigError("power family: requires m < p");
  if (!(p < s)) throw ConfigError("power family: requires p < s");
  const double p_star = N * p / (N - p);
  if (!(s < p_star)) {
    std::ostringstream os;
    os << "power family: requires s < Np/(N-p) = " << p_star;
    throw ConfigError(os.str());
  }
  return Nonlinearity::power(m, s);
}

namespace {

bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

}  // namespace

Nonlinearity load_tabulated_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("tabulated CSV: missing header row");
  double probe = 0.0;
  const auto comma0 = line.find(',');
  if (comma0 == std::string::npos) throw ConfigError("tabulated CSV: header must have two columns");
  if (parse_double(std::string_view(line).substr(0, comma0), probe)) {
    throw ConfigError("tabulated CSV: header row required (first row is numeric)");
  }
  std::vector<double> u;
  std::vector<double> f;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto comma = line.find(',');
    double x = 0.0;
    double y = 0.0;
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos ||
        !parse_double(std::string_view(line).substr(0, comma), x) ||
        !parse_double(std::string_view(line).substr(comma + 1), y)) {
      throw ConfigError("tabulated CSV: malformed row at line " + std::to_string(line_no));
    }
    u.push_back(x);
    f.push_back(y);
  }
  return Nonlinearity::tabulated(std::move(u), std::move(f));
}

Nonlinearity load_tabulated_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tabulated nonlinearity file " + path.string());
  return load_tabulated_csv(in);
}

// ---------------------------------------------------------------------------
// Landmarks

namespace {

struct SearchRange {
  double lo;   // smallest positive magnitude scanned
  double hi;   // largest magnitude scanned on the positive side
  double neg;  // largest magnitude scanned on the negative side
};

SearchRange search_range(const Nonlinearity& nl, double search_max) {
  if (nl.power_family()) return {1e-8, search_max, search_max};
  const auto& nodes = nl.nodes();
  double smallest = std::numeric_limits<double>::infinity();
  for (double x : nodes) {
    if (x != 0.0) smallest = std::min(smallest, std::abs(x));
  }
  return {std::min(smallest, 1e-8), std::min(search_max, nl.domain_max()),
          std::min(search_max, -nl.domain_min())};
}

// Magnitudes of sign changes of g(sign * t) for t on a geometric grid.
template <class G>
std::vector<double> sign_change_roots(G&& g, double sign, double lo, double hi, int n = 4000) {
  std::vector<double> roots;
  const auto grid = detail::geometric_grid(lo, hi, n);
  const auto h = [&](double t) { return g(sign * t); };
  double prev = h(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = h(grid[i]);
    if (prev == 0.0) {
      roots.push_back(grid[i - 1]);
    } else if (prev * cur < 0.0) {
      roots.push_back(detail::bracketed_root(h, grid[i - 1], grid[i], prev, cur));
    }
    prev = cur;
  }
  if (prev == 0.0) roots.push_back(grid.back());
  return roots;
}

double zero_of_F_beyond(const Nonlinearity& nl, double sign, double start, double limit) {
  const auto h = [&](double t) { return nl.F(sign * t); };
  double lo = start;
  double hi = start;
  double f_hi = h(hi);
  while (!(f_hi > 0.0)) {
    lo = hi;
    hi = std::min(2.0 * hi, limit);
    f_hi = h(hi);
    if (hi >= limit && !(f_hi > 0.0)) {
      throw LandmarkError("no zero of F found beyond the zero of f within the search range");
    }
  }
  return detail::bracketed_root(h, lo, hi, h(lo), f_hi);
}

}  // namespace

std::vector<double> nonzero_zeros(const Nonlinearity& nl, double search_max) {
  const SearchRange range = search_range(nl, search_max);
  const auto f = [&](double x) { return nl.f(x); };
  std::vector<double> out;
  for (double r : sign_change_roots(f, -1.0, range.lo, range.neg)) out.push_back(-r);
  for (double r : sign_change_roots(f, 1.0, range.lo, range.hi)) out.push_back(r);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> interior_F_maxima(const Nonlinearity& nl, double search_max) {
  std::vector<double> out;
  for (double z : nonzero_zeros(nl, search_max)) {
    const double d = 1e-3 * std::abs(z);
    if (z - d < nl.domain_min() || z + d > nl.domain_max()) continue;
    if (nl.f(z - d) > 0.0 && nl.f(z + d) < 0.0) out.push_back(z);
  }
  return out;
}

std::pair<double, double> monotonicity_interval(const Nonlinearity& nl, double b_minus, double a_plus) {
  if (const auto* pf = nl.power_family()) {
    const double a = std::pow((pf->m - 1.0) / (pf->s - 1.0), 1.0 / (pf->s - pf->m));
    return {-a, a};
  }
  const double a = detail::grid_minimize([&](double x) { return nl.f(x); }, 0.0, a_plus).first;
  const double b = detail::grid_minimize([&](double x) { return -nl.f(x); }, b_minus, 0.0).first;
  return {b, a};
}

std::pair<double, double> monotonicity_interval(const Nonlinearity& nl) {
  const auto zeros = nonzero_zeros(nl);
  const auto pos = std::find_if(zeros.begin(), zeros.end(), [](double z) { return z > 0.0; });
  if (pos == zeros.end() || pos == zeros.begin()) {
    throw LandmarkError("f needs zeros on both sides of 0 for a monotonicity interval");
  }
  return monotonicity_interval(nl, zeros.front(), zeros.back());
}

Landmarks landmarks(const Nonlinearity& nl, double p, double N, LandmarkOptions opts) {
  Landmarks lm;
  const SearchRange range = search_range(nl, opts.search_max);
  const auto f = [&](double x) { return nl.f(x); };

  const auto pos = sign_change_roots(f, 1.0, range.lo, range.hi);
  const auto neg = sign_change_roots(f, -1.0, range.lo, range.neg);
  if (pos.empty()) throw LandmarkError("f has no positive zero in the search range");
  if (neg.empty()) throw LandmarkError("f has no negative zero in the search range");
  lm.a_plus = pos.back();
  lm.b_minus = -neg.back();

  lm.A = zero_of_F_beyond(nl, 1.0, lm.a_plus, range.hi);
  lm.B = -zero_of_F_beyond(nl, -1.0, -lm.b_minus, range.neg);

  std::tie(lm.b, lm.a) = monotonicity_interval(nl, lm.b_minus, lm.a_plus);

  const auto F = [&](double x) { return nl.F(x); };
  double min_F = std::min(detail::grid_minimize(F, lm.B, 0.0).second,
                          detail::grid_minimize(F, 0.0, lm.A).second);
  // Critical points of F inside [B, A] are the zeros of f found above.
  for (double r : pos) {
    if (r <= lm.A) min_F = std::min(min_F, nl.F(r));
  }
  for (double r : neg) {
    if (-r >= lm.B) min_F = std::min(min_F, nl.F(-r));
  }
  lm.F_bar = -min_F;
  lm.p_star = N * p / (N - p);
  return lm;
}

// ---------------------------------------------------------------------------
// Hypotheses

bool HypothesisReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const HypothesisCheck* HypothesisReport::find(const std::string& id) const {
  for (const auto& c : checks) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

namespace {

// Local power-law exponent of |g(x0 + sign t) - g(x0)| as t -> 0, from a
// log-log slope over two small offsets.
template <class G>
double local_exponent(G&& g, double x0, double sign, double t_small) {
  const double g0 = g(x0);
  const double t1 = t_small;
  const double t2 = 4.0 * t_small;
  const double d1 = std::abs(g(x0 + sign * t1) - g0);
  const double d2 = std::abs(g(x0 + sign * t2) - g0);
  if (d1 <= 0.0 || d2 <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log(d2 / d1) / std::log(t2 / t1);
}

}  // namespace

HypothesisReport verify_hypotheses(const Nonlinearity& nl, double p, double N, double theta_growth,
                                   double u_max) {
  HypothesisReport rep;
  const auto* pf = nl.power_family();
  const SearchRange range = search_range(nl, u_max);
  const double hi = std::min(u_max, range.hi);
  const double neg_hi = std::min(u_max, range.neg);

  {  // H1
    HypothesisCheck c{"H1", false, std::abs(nl.f(0.0)), ""};
    c.passed = c.witness <= 1e-14;
    c.detail = "|f(0)| = " + std::to_string(c.witness);
    rep.checks.push_back(c);
  }

  std::optional<Landmarks> lm;
  try {
    lm = landmarks(nl, p, N, LandmarkOptions{u_max});
  } catch (const Error& e) {
    rep.checks.push_back({"landmarks", false, 0.0, e.what()});
  }

  {  // H2
    HypothesisCheck c{"H2", false, 0.0, ""};
    if (lm && lm->a > 0.0 && lm->b < 0.0) {
      c.witness = lm->a;
      bool decreasing = true;
      const int n = 2001;
      double prev = nl.f(lm->b);
      for (int i = 1; i < n; ++i) {
        const double x = lm->b + (lm->a - lm->b) * i / (n - 1);
        const double cur = nl.f(x);
        if (!(cur < prev)) decreasing = false;
        prev = cur;
      }
      c.passed = decreasing;
      c.detail = decreasing ? "f strictly decreasing on (b, a)" : "f not decreasing on (b, a)";
    } else {
      c.detail = "no decreasing interval (b, a) around 0 found";
    }
    rep.checks.push_back(c);
  }

  {  // H3: |F|^{-1/p} integrable near 0 iff local exponent of F < p.
    HypothesisCheck c{"H3", false, 0.0, ""};
    double alpha = 0.0;
    if (pf) {
      alpha = pf->m;
    } else {
      const double t = std::max(range.lo, 1e-6);
      alpha = std::max(local_exponent([&](double x) { return nl.F(x); }, 0.0, 1.0, t),
                       local_exponent([&](double x) { return nl.F(x); }, 0.0, -1.0, t));
    }
    c.witness = alpha / p;
    c.passed = c.witness < 1.0;
    c.detail = "F ~ |u|^" + std::to_string(alpha) + " near 0; integrable iff exponent/p < 1";
    rep.checks.push_back(c);
  }

  if (lm && !pf) {  // H3 extended clause at interior local maxima of F
    HypothesisCheck c{"H3-ext", true, 0.0, "no interior local maximum of F"};
    const std::vector<double> maxima = interior_F_maxima(nl, u_max);
    for (double x0 : maxima) {
      const double t = 1e-4 * std::abs(x0);
      const auto G = [&](double x) { return nl.F(x); };
      const double beta = std::max(local_exponent(G, x0, 1.0, t), local_exponent(G, x0, -1.0, t));
      c.witness = std::max(c.witness, beta / p);
      if (!(beta / p < 1.0)) {
        c.passed = false;
        c.detail = "F(x0) - F(u) ~ |u - x0|^" + std::to_string(beta) + " at local maximum x0 = " +
                   std::to_string(x0);
      }
    }
    if (!maxima.empty() && c.passed) c.detail = "integrable at every interior local maximum of F";
    rep.checks.push_back(c);
  }

  {  // H4
    HypothesisCheck c{"H4", true, -std::numeric_limits<double>::infinity(), ""};
    const auto f = [&](double x) { return nl.f(x); };
    std::vector<double> zeros = sign_change_roots(f, 1.0, range.lo, hi);
    for (double r : sign_change_roots(f, -1.0, range.lo, neg_hi)) zeros.push_back(-r);
    for (double z : zeros) {
      const double Fz = nl.F(z);
      c.witness = std::max(c.witness, Fz);
      if (!(Fz < 0.0)) c.passed = false;
    }
    if (zeros.empty()) {
      c.passed = false;
      c.detail = "f has no nonzero zeros";
    } else {
      c.detail = "max F over nonzero zeros of f = " + std::to_string(c.witness);
    }
    rep.checks.push_back(c);
  }

  {  // H5: f nondecreasing for large |u| and f / phi_p(u) unbounded.
    HypothesisCheck c{"H5", true, std::numeric_limits<double>::infinity(), ""};
    const double start = lm ? std::max({1.0, lm->A, -lm->B}) : 1.0;
    for (double sign : {1.0, -1.0}) {
      const double top = sign > 0 ? hi : neg_hi;
      if (!(top > start)) {
        c.passed = false;
        c.detail = "growth range too short";
        continue;
      }
      const auto grid = detail::geometric_grid(start, top, 400);
      bool exceeded = false;
      bool tail_monotone = true;
      double prev_ratio = 0.0;
      double prev_f = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = sign * grid[i];
        const double fx = nl.f(x);
        const double ratio = fx / phi(x, p);
        if (ratio > 1e3) exceeded = true;
        if (i >= grid.size() / 2) {
          if (ratio < prev_ratio || sign * fx < sign * prev_f) tail_monotone = false;
        }
        prev_ratio = ratio;
        prev_f = fx;
      }
      c.witness = std::min(c.witness, prev_ratio);
      if (!exceeded || !tail_monotone) c.passed = false;
    }
    if (c.detail.empty()) {
      c.detail = "f/phi_p(u) at u_max = " + std::to_string(c.witness) +
                 (c.passed ? " (exceeds 1e3, increasing)" : " (growth proxy failed)");
    }
    rep.checks.push_back(c);
  }

  {  // H6
    HypothesisCheck c{"H6", false, 0.0, ""};
    const double bound = (N - p) / (N * p);
    if (!(theta_growth > 0.0 && theta_growth < 1.0)) {
      c.detail = "theta_growth must lie in (0, 1)";
    } else {
      if (pf) {
        c.witness = std::pow(theta_growth, pf->s) / pf->s;
      } else {
        const double xp = hi;
        const double xn = -neg_hi;
        c.witness = std::min(nl.F(theta_growth * xp) / (xp * nl.f(xp)),
                             nl.F(theta_growth * xn) / (xn * nl.f(xn)));
      }
      c.passed = c.witness > bound;
      c.detail = "liminf F(theta x)/(x f(x)) = " + std::to_string(c.witness) + " vs (N-p)/(Np) = " +
                 std::to_string(bound);
    }
    rep.checks.push_back(c);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Rotation certificate

RotationCertificate rotation_constants(const Nonlinearity& nl, double p, double N, double omega,
                                       double s_cap) {
  if (!(omega > 0.0 && omega < 0.125)) throw DomainError("omega must lie in (0, 1/8)");
  const double q = p / (p - 1.0);
  const auto g = [&](double s) { return std::abs(nl.f(s)) - 4.0 * omega * std::pow(std::abs(s), p - 1.0); };

  const double lo = 1e-8;
  double s_root = lo;
  for (double sign : {1.0, -1.0}) {
    const double top = std::min(s_cap, sign > 0 ? nl.domain_max() : -nl.domain_min());
    const auto grid = detail::geometric_grid(lo, top, 4000);
    std::size_t last_fail = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (g(sign * grid[i]) < 0.0) last_fail = i;
    }
    if (last_fail == grid.size()) continue;
    if (last_fail + 1 == grid.size()) {
      throw HypothesisError("|f(s)| >= 4 omega |s|^(p-1) still fails at the search cap");
    }
    const auto h = [&](double t) { return g(sign * t); };
    s_root = std::max(s_root, detail::bracketed_root(h, grid[last_fail], grid[last_fail + 1]));
  }

  RotationCertificate cert;
  cert.omega = omega;
  cert.s0 = 1.05 * s_root;

  for (double sign : {1.0, -1.0}) {
    for (const double t : detail::geometric_grid(cert.s0, 1e3 * cert.s0, 1000)) {
      if (std::abs(t) > (sign > 0 ? nl.domain_max() : -nl.domain_min())) break;
      if (g(sign * t) < 0.0) {
        throw HypothesisError("rotation inequality fails above the grid-refined s0");
      }
    }
  }

  cert.sup_f = -detail::grid_minimize([&](double s) { return -std::abs(nl.f(s)); }, -cert.s0, cert.s0)
                    .second;
  cert.r0 = 2.0 * (N - 1.0) / (omega * std::pow(p - 1.0, 1.0 / q));
  cert.sigma0 = std::max(std::pow(2.0, 1.0 / p) * cert.s0, std::pow(4.0 * cert.sup_f, 1.0 / (p - 1.0)));
  return cert;
}

}  // namespace plshoot
