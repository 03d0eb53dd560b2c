#include <doctest.h>

#include <cmath>

#include "plshoot/polar.hpp"
#include "plshoot/powers.hpp"

using namespace plshoot;

namespace {

Nonlinearity reference() { return make_power_family(1.5, 4.0, 2.0, 3.0); }

Trajectory run(double lambda, double r_max = 100.0, bool trap = true, double p = 2.0) {
  ProblemParams pp;
  pp.N = 3.0;
  pp.p = p;
  pp.lambda = lambda;
  pp.r_max = r_max;
  IntegrateOptions io;
  io.stop_on_trap = trap;
  const Nonlinearity nl = p == 2.0 ? reference() : make_power_family(2.0, 4.0, 2.5, 3.0);
  return integrate(pp, nl, io);
}

}  // namespace

TEST_SUITE("polar") {

TEST_CASE("trace starts on the positive axis") {
  const Trajectory t = run(7.0);
  const AngularTrace tr = track_angle(t);
  CHECK(tr.samples.front().theta == 0.0);
  CHECK(tr.samples.front().rho == doctest::Approx(49.0));
  CHECK(tr.half_period == doctest::Approx(M_PI).epsilon(1e-12));
  CHECK(tr.samples.size() == tr.theta_quadrature.size());
  CHECK(tr.samples.back().theta < 0.0);
}

TEST_CASE("node count matches zero events at every sample") {
  for (double lambda : {3.0, 10.0, 25.0, 45.0, 70.0}) {
    CAPTURE(lambda);
    const Trajectory t = run(lambda);
    const AngularTrace tr = track_angle(t);
    for (const AngleSample& s : tr.samples) {
      CAPTURE(s.r);
      CHECK(node_count(tr, s.r) == static_cast<int>(t.count(EventKind::SimpleZero, std::nextafter(s.r, 1e300))));
    }
  }
}

TEST_CASE("angle routes agree") {
  for (double lambda : {3.0, 60.0, 1000.0}) {
    CAPTURE(lambda);
    const AngularTrace tr = track_angle(run(lambda));
    CHECK(tr.warnings.empty());
  }
  const AngularTrace tr = track_angle(run(40.0, 100.0, true, 2.5));
  CHECK(tr.warnings.empty());
}

TEST_CASE("rotation bound in the certified region") {
  const Nonlinearity nl = reference();
  const RotationCertificate cert = rotation_constants(nl, 2.0, 3.0, 1.0 / 16.0);
  const AngularTrace tr = track_angle(run(1e5, 80.0, false));
  int in_region = 0;
  for (const AngleSample& s : tr.samples) in_region += (s.r >= cert.r0 && s.rho >= cert.sigma0 * cert.sigma0);
  CHECK(in_region > 100);
  CHECK(check_rotation_bound(tr, cert, 2.0).empty());
}

TEST_CASE("rotation check flags a stalled angle") {
  RotationCertificate cert;
  cert.omega = 0.0625;
  cert.r0 = 1.0;
  cert.sigma0 = 1.0;
  AngularTrace tr;
  tr.half_period = M_PI;
  for (int i = 0; i <= 20; ++i) {
    const double r = 0.5 * i;
    // Rotates at rate 1 up to r = 5, then stalls.
    tr.samples.push_back(AngleSample{r, 4.0, r < 5.0 ? -r : -5.0});
  }
  const auto v = check_rotation_bound(tr, cert, 2.0);
  CHECK_FALSE(v.empty());
  for (const auto& x : v) CHECK(x.r >= 5.0);
}

TEST_CASE("zeros sit on the vertical axis") {
  const Trajectory t = run(60.0);
  const AngularTrace tr = track_angle(t);
  const double pi = tr.half_period;
  int zeros = 0;
  for (const Event& e : t.events()) {
    if (e.kind != EventKind::SimpleZero) continue;
    const double th = tr.theta_at(e.r);
    const double folded = th - pi * std::floor(th / pi);
    CHECK(std::abs(folded - 0.5 * pi) <= 1e-6);
    ++zeros;
  }
  CHECK(zeros == 4);
}

TEST_CASE("equilibrium keeps the angle at 0 and rho matches the state") {
  const Trajectory t = run(1.0, 10.0);
  for (const AngleSample& s : track_angle(t).samples) CHECK(s.theta == 0.0);

  const Trajectory u = run(25.0);
  const AngularTrace tr = track_angle(u);
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    const PhaseState& st = u.samples()[i].state;
    const double rho = std::pow(std::abs(st.u), 2.0) + std::pow(std::abs(st.v), 2.0);
    CHECK(tr.samples[i].rho == doctest::Approx(rho).epsilon(1e-9));
  }
}

TEST_CASE("node count at half turns") {
  AngularTrace tr;
  tr.half_period = M_PI;
  tr.samples = {AngleSample{0.0, 1.0, 0.0}, AngleSample{1.0, 1.0, -M_PI}};
  CHECK(node_count(tr, 0.0) == 0);
  CHECK(node_count(tr, 1.0) == 1);
}

TEST_CASE("theta_at interpolates and guards its range") {
  const AngularTrace tr = track_angle(run(10.0));
  const auto& s = tr.samples;
  const double mid = 0.5 * (s[3].r + s[4].r);
  CHECK(tr.theta_at(mid) == doctest::Approx(0.5 * (s[3].theta + s[4].theta)));
  CHECK_THROWS_AS(tr.theta_at(-0.1), DomainError);
  CHECK_THROWS_AS(tr.theta_at(tr.r_end() + 1.0), DomainError);
}

TEST_CASE("energy and rho at a phase point") {
  const Nonlinearity nl = reference();
  const PhaseState s{1.0, 2.0, -0.5};
  const auto [E, rho] = energy_rho_link(s, nl, 2.0);
  CHECK(E == doctest::Approx(0.125 + nl.F(2.0)));
  CHECK(rho == doctest::Approx(4.0 + 0.25));

  const double A = std::pow(8.0 / 3.0, 0.4);
  const auto [EA, rhoA] = energy_rho_link(PhaseState{0.0, A, 0.0}, nl, 2.0);
  CHECK(std::abs(EA) < 1e-14);
  CHECK(rhoA == doctest::Approx(A * A));
  const auto [E0, rho0] = energy_rho_link(PhaseState{0.0, 0.0, 0.0}, nl, 2.0);
  CHECK(E0 == 0.0);
  CHECK(rho0 == 0.0);
}

}  // TEST_SUITE
