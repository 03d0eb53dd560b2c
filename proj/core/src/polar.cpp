#include "plshoot/polar.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plshoot/powers.hpp"
#include "plshoot/quadrature.hpp"

namespace plshoot {

double AngularTrace::theta_at(double r) const {
  if (samples.empty() || r < r_begin() || r > r_end()) {
    std::ostringstream os;
    os << "angle requested at r = " << r << " outside the traced range";
    throw DomainError(os.str());
  }
  const auto it = std::lower_bound(samples.begin(), samples.end(), r,
                                   [](const AngleSample& s, double x) { return s.r < x; });
  if (it->r == r) return it->theta;
  const auto& b = *it;
  const auto& a = *(it - 1);
  return a.theta + (b.theta - a.theta) * (r - a.r) / (b.r - a.r);
}

namespace {

double nearest_branch(double raw, double ref, double period) {
  return raw + period * std::round((ref - raw) / period);
}

// Bisects while the two-halves estimate moves by more than an absolute 1e-13.
template <class G>
double refine_gl10(const G& g, double a, double b, double whole, int depth) {
  const double m = 0.5 * (a + b);
  const double left = gauss_legendre10(g, a, m);
  const double right = gauss_legendre10(g, m, b);
  if (depth >= 10 || std::abs(left + right - whole) <= 1e-13) return left + right;
  return refine_gl10(g, a, m, left, depth + 1) + refine_gl10(g, m, b, right, depth + 1);
}

}  // namespace

AngularTrace track_angle(const Trajectory& traj, const PTrig& trig, const TrackOptions& opts) {
  const double p = trig.p();
  const double q = trig.q();
  const double N = traj.N();
  const Nonlinearity& nl = traj.nonlinearity();
  const double pi_p = trig.half_period();
  const double period = 2.0 * pi_p;
  const double floor_rho = opts.rho_floor_rel * std::pow(traj.lambda(), p);
  const auto& S = traj.samples();

  AngularTrace out;
  out.half_period = pi_p;
  const double rho0 = trig.rho(S.front().state.u, S.front().state.v);
  if (!(rho0 >= floor_rho) || rho0 == 0.0) throw DomainError("rho below the floor at the start of the trace");

  const auto theta_dot = [&](const PhaseState& s) {
    const double rho = trig.rho(s.u, s.v);
    const double radial = (s.r > 0.0) ? (N - 1.0) * s.u * s.v / s.r : 0.0;
    return -(p * Phi(s.v, q) + s.u * nl.f(s.u) + radial) / rho;
  };

  out.samples.push_back(AngleSample{S.front().state.r, rho0, 0.0});
  out.theta_quadrature.push_back(0.0);

  for (std::size_t i = 1; i < S.size(); ++i) {
    const PhaseState& st = S[i].state;
    const double rho = trig.rho(st.u, st.v);
    if (rho < floor_rho) {
      out.truncated = true;
      break;
    }
    const double r0 = S[i - 1].state.r;
    const double r1 = st.r;
    const double prev = out.samples.back().theta;

    // Unwrap by continuity, subdividing through dense output while the jump
    // to the nearest branch is large.
    double theta = nearest_branch(trig.cartesian_to_polar(st.u, st.v).theta, prev, period);
    if (std::abs(theta - prev) > 0.25 * pi_p) {
      int pieces = 8;
      for (;;) {
        double ref = prev;
        bool ok = true;
        for (int j = 1; j <= pieces; ++j) {
          const double rj = (j == pieces) ? r1 : r0 + (r1 - r0) * j / pieces;
          const PhaseState sj = (j == pieces) ? st : traj.at(rj);
          const double tj = nearest_branch(trig.cartesian_to_polar(sj.u, sj.v).theta, ref, period);
          if (std::abs(tj - ref) > 0.25 * pi_p) ok = false;
          ref = tj;
        }
        if (ok || pieces >= 4096) {
          theta = ref;
          break;
        }
        pieces *= 4;
      }
    }

    const double dq = refine_gl10([&](double r) { return theta_dot(traj.at(r)); }, r0, r1,
                                  gauss_legendre10([&](double r) { return theta_dot(traj.at(r)); }, r0, r1), 0);
    const double tq = out.theta_quadrature.back() + dq;

    out.samples.push_back(AngleSample{r1, rho, theta});
    out.theta_quadrature.push_back(tq);
    if (std::abs(theta - tq) > opts.agreement_tol) out.warnings.push_back(AngleWarning{r1, theta, tq});
  }
  return out;
}

AngularTrace track_angle(const Trajectory& traj, const TrackOptions& opts) {
  return track_angle(traj, PTrig(PExponent(traj.p())), opts);
}

int node_count(const AngularTrace& trace, double r) {
  const double pi_p = trace.half_period;
  return static_cast<int>(std::floor((0.5 * pi_p - trace.theta_at(r)) / pi_p + 1e-9));
}

std::vector<RotationViolation> check_rotation_bound(const AngularTrace& trace,
                                                    const RotationCertificate& cert, double p,
                                                    double slack) {
  std::vector<RotationViolation> out;
  const double rho_min = std::pow(cert.sigma0, p);
  const auto& S = trace.samples;
  for (std::size_t i = 1; i + 1 < S.size(); ++i) {
    if (S[i].r < cert.r0 || S[i].rho < rho_min) continue;
    const double slope = (S[i + 1].theta - S[i - 1].theta) / (S[i + 1].r - S[i - 1].r);
    if (!(slope < -cert.omega + slack)) out.push_back(RotationViolation{S[i].r, S[i].rho, slope});
  }
  return out;
}

std::pair<double, double> energy_rho_link(const PhaseState& s, const Nonlinearity& nl, double p) {
  const double q = p / (p - 1.0);
  return {energy(s, nl, p), std::pow(std::abs(s.u), p) + p * Phi(s.v, q)};
}

}  // namespace plshoot
