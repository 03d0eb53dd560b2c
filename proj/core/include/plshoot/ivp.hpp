#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "plshoot/error.hpp"
#include "plshoot/model.hpp"

namespace plshoot {

struct Tolerances {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double event_tol = 1e-10;
  double double_zero_tol = 1e-7;
};

struct ProblemParams {
  double N = 3.0;
  double p = 2.0;
  double lambda = 1.0;
  double r_max = 100.0;
  Tolerances tol;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

/// v = phi_p(u').
struct PhaseState {
  double r = 0.0;
  double u = 0.0;
  double v = 0.0;
};

enum class EventKind { SimpleZero, CriticalPoint, DoubleZero, EnergyZeroCrossing };
enum class StopReason { ReachedRmax, EnergyTrapped, DoubleZero, Diverged };

const char* to_string(EventKind k);
const char* to_string(StopReason s);

struct Event {
  EventKind kind = EventKind::SimpleZero;
  double r = 0.0;
  PhaseState state;
  double E = 0.0;
};

/// A stored step boundary. du, dv are the right-hand side there and drive the
/// cubic Hermite dense output; cu, cv add the quartic term t^2 (1-t)^2 c of
/// the integrator's continuous extension on the interval ending here (zero
/// leaves plain Hermite).
struct Sample {
  PhaseState state;
  double E = 0.0;
  double du = 0.0;
  double dv = 0.0;
  double cu = 0.0;
  double cv = 0.0;
};

/// Energy |u'|^p / q + F(u).
double energy(const PhaseState& s, const Nonlinearity& nl, double p);
/// r^{q(N-1)} E.
double weighted_energy(const PhaseState& s, const Nonlinearity& nl, double p, double N);

struct IntegrateOptions {
  /// Stop at the first critical point after the energy drops below
  /// -10 event_tol. Off for long-time asymptotic runs.
  bool stop_on_trap = true;
  bool stop_at_double_zero = true;
  /// Fixed startup radius; default derived from lambda and f(lambda).
  std::optional<double> startup_delta;
  /// |u| beyond this stops the run as Diverged; default 10 max(lambda, A).
  std::optional<double> divergence_bound;
  std::size_t max_zeros = 1000;
};

/// Result of one integration. Immutable once returned.
class Trajectory {
 public:
  /// samples must start at r = 0 with strictly increasing radii. When
  /// delta > 0 and samples[1] sits at delta, the first interval uses the
  /// startup series instead of Hermite interpolation.
  static Trajectory assemble(std::vector<Sample> samples, std::vector<Event> events,
                             StopReason stop, double N, double p, double lambda, double delta,
                             Nonlinearity nl);

  const std::vector<Sample>& samples() const noexcept { return samples_; }
  const std::vector<Event>& events() const noexcept { return events_; }
  StopReason stop_reason() const noexcept { return stop_; }

  double N() const noexcept { return N_; }
  double p() const noexcept { return p_; }
  double lambda() const noexcept { return lambda_; }
  const Nonlinearity& nonlinearity() const noexcept { return nl_; }
  double startup_delta() const noexcept { return delta_; }
  double r_end() const noexcept { return samples_.back().state.r; }

  /// Dense output on [0, r_end]; throws DomainError outside.
  PhaseState at(double r) const;
  double energy_at(double r) const;

  /// Events of the given kind with radius strictly below r_limit.
  std::size_t count(EventKind kind, double r_limit = std::numeric_limits<double>::infinity()) const;
  std::optional<Event> first(EventKind kind) const;
  /// Smallest |u| + |u'| over zero, critical and double-zero events; +inf if none.
  double closest_approach() const;

  /// Copy with an identically zero branch appended on (r_end, r_to].
  Trajectory with_zero_extension(double r_to) const;
  bool zero_extended() const noexcept { return extended_from_.has_value(); }
  std::optional<double> zero_extended_from() const noexcept { return extended_from_; }

 private:
  std::vector<Sample> samples_;
  std::vector<Event> events_;
  StopReason stop_ = StopReason::ReachedRmax;
  double N_ = 0.0;
  double p_ = 0.0;
  double lambda_ = 0.0;
  double delta_ = 0.0;
  Nonlinearity nl_;
  std::optional<double> extended_from_;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, PhaseState last)
      : Error(ErrorCategory::Numerical, what), last_(last) {}
  const PhaseState& last_state() const noexcept { return last_; }

 private:
  PhaseState last_;
};

class StartupError : public Error {
 public:
  explicit StartupError(const std::string& what) : Error(ErrorCategory::Numerical, what) {}
};

/// Default startup radius for amplitude lambda.
double default_startup_delta(const ProblemParams& params, const Nonlinearity& nl);

/// State at r = delta from the fixed-point iteration of the integral form of
/// the equation, solved in the variable xi = r^q where the solution is smooth.
PhaseState startup(const ProblemParams& params, const Nonlinearity& nl, double delta);

Trajectory integrate(const ProblemParams& params, const Nonlinearity& nl,
                     const IntegrateOptions& opts = {});

}  // namespace plshoot
