#pragma once

#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace plshoot {

/// Exponents of f(u) = |u|^{s-2}u - |u|^{m-2}u.
struct PowerFamily {
  double m = 0.0;
  double s = 0.0;
};

/// The nonlinearity f and its primitive F (F(0) = 0).
///
/// Either the built-in two-power family or a table of (u, f(u)) samples with
/// monotone cubic (Fritsch-Carlson) interpolation; F is then integrated
/// exactly from the interpolant. Tabulated evaluation outside the table range
/// throws DomainError. Cheap to copy; immutable.
class Nonlinearity {
 public:
  /// Unvalidated power family. Prefer make_power_family().
  static Nonlinearity power(double m, double s);
  /// u strictly increasing, at least 4 nodes, u.front() < 0 < u.back().
  static Nonlinearity tabulated(std::vector<double> u, std::vector<double> f);

  double f(double u) const;
  double F(double u) const;

  const PowerFamily* power_family() const noexcept { return std::get_if<PowerFamily>(&impl_); }
  bool is_tabulated() const noexcept { return !power_family(); }
  /// Closed evaluation interval; (-inf, inf) for the power family.
  double domain_min() const noexcept;
  double domain_max() const noexcept;
  /// Table abscissae (empty for the power family).
  const std::vector<double>& nodes() const noexcept;

  std::string describe() const;

  struct Table;

 private:
  std::variant<PowerFamily, std::shared_ptr<const Table>> impl_;
};

/// Validated power family: requires N > p and 1 < m < p < s < Np/(N-p).
Nonlinearity make_power_family(double m, double s, double p, double N);

/// Two-column CSV (header row, then u,f rows with strictly increasing u).
Nonlinearity load_tabulated_csv(std::istream& in);
Nonlinearity load_tabulated_csv(const std::filesystem::path& path);

struct Landmarks {
  double a_plus = 0.0;   // largest positive zero of f
  double b_minus = 0.0;  // smallest negative zero of f
  double a = 0.0;        // f strictly decreasing on (b, a)
  double b = 0.0;
  double A = 0.0;        // positive zero of F beyond a_plus
  double B = 0.0;        // negative zero of F below b_minus
  double F_bar = 0.0;    // -min_{[B, A]} F
  double p_star = 0.0;   // Np / (N - p)
};

struct LandmarkOptions {
  /// Root brackets are searched in [-search_max, search_max] (clipped to the
  /// table range for tabulated input).
  double search_max = 1e6;
};

Landmarks landmarks(const Nonlinearity& nl, double p, double N, LandmarkOptions opts = {});

/// Nonzero sign changes of f in [-search_max, search_max], ascending.
std::vector<double> nonzero_zeros(const Nonlinearity& nl, double search_max = 1e6);
/// Nonzero zeros of f where f turns from positive to negative.
std::vector<double> interior_F_maxima(const Nonlinearity& nl, double search_max = 1e6);

/// (b, a): f strictly decreasing between them through 0. The power family
/// uses the critical points of f; otherwise the extrema of f on
/// [b_minus, 0] and [0, a_plus].
std::pair<double, double> monotonicity_interval(const Nonlinearity& nl, double b_minus, double a_plus);
std::pair<double, double> monotonicity_interval(const Nonlinearity& nl);

struct HypothesisCheck {
  std::string id;  // "H1" ... "H6", "H3-ext"
  bool passed = false;
  double witness = 0.0;
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;

  bool all_passed() const;
  const HypothesisCheck* find(const std::string& id) const;
};

/// Grid-based checks of the structural hypotheses. Failures are report
/// entries, never exceptions. u_max bounds the growth checks.
HypothesisReport verify_hypotheses(const Nonlinearity& nl, double p, double N, double theta_growth,
                                   double u_max = 1e6);

/// Constants of the angular-velocity lower bound for a given omega in (0, 1/8).
struct RotationCertificate {
  double omega = 0.0;
  double s0 = 0.0;
  double r0 = 0.0;
  double sigma0 = 0.0;
  double sup_f = 0.0;  // sup of |f| on [-s0, s0]
};

/// Throws DomainError for omega outside (0, 1/8) and HypothesisError if no
/// s0 below s_cap exists.
RotationCertificate rotation_constants(const Nonlinearity& nl, double p, double N, double omega,
                                       double s_cap = 1e6);

}  // namespace plshoot
