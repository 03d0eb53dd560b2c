#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "plshoot/ivp.hpp"
#include "plshoot/model.hpp"
#include "plshoot/ptrig.hpp"

namespace plshoot {

struct AngleSample {
  double r = 0.0;
  double rho = 0.0;
  double theta = 0.0;  // unwrapped, pointwise inversion
};

/// Sample where the two angle routes disagree beyond the configured tolerance.
struct AngleWarning {
  double r = 0.0;
  double theta_pointwise = 0.0;
  double theta_quadrature = 0.0;
};

struct RotationViolation {
  double r = 0.0;
  double rho = 0.0;
  double dtheta = 0.0;  // centered finite-difference slope
};

/// One entry per trajectory sample up to the first sample with rho below the
/// floor (or the end of the trajectory).
struct AngularTrace {
  std::vector<AngleSample> samples;
  /// Angle from cumulative quadrature of the angular equation, same radii.
  std::vector<double> theta_quadrature;
  std::vector<AngleWarning> warnings;
  std::optional<std::vector<RotationViolation>> omega_check;
  double half_period = 0.0;
  /// True when tracking stopped early at the rho floor.
  bool truncated = false;

  double r_begin() const { return samples.front().r; }
  double r_end() const { return samples.back().r; }
  /// Linear interpolation of the unwrapped angle; DomainError outside range.
  double theta_at(double r) const;
};

struct TrackOptions {
  /// rho floor relative to lambda^p.
  double rho_floor_rel = 1e-12;
  double agreement_tol = 1e-6;
};

AngularTrace track_angle(const Trajectory& traj, const PTrig& trig, const TrackOptions& opts = {});
AngularTrace track_angle(const Trajectory& traj, const TrackOptions& opts = {});

/// floor((pi_p/2 - theta(r)) / pi_p): zeros in (0, r], a zero sitting exactly
/// at r included.
int node_count(const AngularTrace& trace, double r);

/// Samples with r >= r0 and rho >= sigma0^p whose centered difference slope is
/// not below -omega + slack.
std::vector<RotationViolation> check_rotation_bound(const AngularTrace& trace,
                                                    const RotationCertificate& cert, double p,
                                                    double slack = 1e-4);

/// (E, rho) at a phase state.
std::pair<double, double> energy_rho_link(const PhaseState& s, const Nonlinearity& nl, double p);

}  // namespace plshoot
