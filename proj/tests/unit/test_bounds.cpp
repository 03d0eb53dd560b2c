#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "plshoot/bounds.hpp"
#include "plshoot/powers.hpp"

using namespace plshoot;

namespace {

Nonlinearity reference() { return make_power_family(1.5, 4.0, 2.0, 3.0); }

ProblemParams reference_params(double r_max = 100.0) {
  ProblemParams pp;
  pp.N = 3.0;
  pp.p = 2.0;
  pp.r_max = r_max;
  return pp;
}

// Frozen: identical at 64 and 128 panels.
constexpr double kBarrierTime = 2.9042825062124966;

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("barrier profile of the reference instance") {
  const Nonlinearity nl = reference();
  const BarrierProfile bar = barrier(nl, 2.0);
  const double a = std::pow(1.0 / 6.0, 0.4);
  CHECK(bar.a() == doctest::Approx(a).epsilon(1e-12));
  CHECK(bar.b() == doctest::Approx(-a).epsilon(1e-12));
  CHECK(bar.substitution_exponent() == doctest::Approx(4.0));
  CHECK(bar.A_time() == doctest::Approx(kBarrierTime).epsilon(1e-12));
  // Odd f: the reflected time is the same.
  CHECK(std::abs(bar.B_time() - bar.A_time()) <= 1e-12 * bar.A_time());

  CHECK(bar.u_bar(0.0) == doctest::Approx(a).epsilon(1e-12));
  CHECK(std::abs(bar.u_bar(bar.A_time())) <= 1e-12);
  CHECK_THROWS_AS(bar.u_bar(-0.1), DomainError);
  CHECK_THROWS_AS(bar.u_bar(bar.A_time() + 0.1), DomainError);

  double prev = INFINITY;
  for (const auto& [r, u] : bar.nodes()) {
    CHECK(u < prev);
    prev = u;
    // First integral (1/q)|u'|^p + F(u) = 0.
    CHECK(std::abs(0.5 * std::pow(bar.u_bar_prime(r), 2.0) + nl.F(u)) <= 1e-8);
  }
}

TEST_CASE("barrier slope matches the profile") {
  const BarrierProfile bar = barrier(reference(), 2.0);
  for (double r : {0.3, 0.9, 1.5, 2.2, 2.7}) {
    CAPTURE(r);
    const double h = 1e-5;
    const double fd = (bar.u_bar(r + h) - bar.u_bar(r - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(bar.u_bar_prime(r)).epsilon(1e-6));
  }
}

TEST_CASE("barrier time against tanh-sinh quadrature") {
  const Nonlinearity nl = reference();
  const double a = std::pow(1.0 / 6.0, 0.4);
  boost::math::quadrature::tanh_sinh<double> ts;
  // F underflows to 0 at the abscissae closest to 0; their weight is negligible.
  const double oracle = ts.integrate(
      [&](double s) { return nl.F(s) < 0.0 ? 1.0 / std::sqrt(-2.0 * nl.F(s)) : 0.0; }, 0.0, a);
  CHECK(std::abs(barrier(nl, 2.0).A_time() - oracle) <= 1e-9 * oracle);

  const Nonlinearity sec = make_power_family(2.0, 4.0, 2.5, 3.0);
  const BarrierProfile bs = barrier(sec, 2.5);
  const double q = 2.5 / 1.5;
  const double sec_oracle =
      ts.integrate([&](double s) { return sec.F(s) < 0.0 ? std::pow(-q * sec.F(s), -1.0 / 2.5) : 0.0; }, 0.0, bs.a());
  CHECK(std::abs(bs.A_time() - sec_oracle) <= 1e-8 * sec_oracle);
}

TEST_CASE("barrier refinement") {
  BarrierOptions fine;
  fine.panels = 128;
  const double coarse = barrier(reference(), 2.0).A_time();
  CHECK(std::abs(barrier(reference(), 2.0, fine).A_time() - coarse) <= 1e-9);
}

TEST_CASE("barrier rejects a positive F or a non-integrable tail") {
  CHECK_THROWS_AS(barrier(reference(), 2.0, -0.5, 1.6), BarrierError);
  // f ~ u near 0 at p = 2: |F|^{-1/2} ~ 1/s is not integrable.
  CHECK_THROWS_AS(barrier(Nonlinearity::power(2.0, 4.0), 2.0), BarrierError);
}

TEST_CASE("support check on node solutions") {
  const Nonlinearity nl = reference();
  const BarrierProfile bar = barrier(nl, 2.0);
  for (int k = 0; k <= 2; ++k) {
    CAPTURE(k);
    const NodeSolution s = find_lambda_k(k, reference_params(), nl);
    const SupportCheck c = support_upper_check(s, bar);
    CHECK(c.conclusive);
    CHECK(c.pass);
    CHECK(c.margin > 0.0);
    CHECK(c.max_u_beyond == 0.0);
    CHECK(c.r_support == doctest::Approx(s.r_support));

    // An R in violation of the lemma's hypothesis leaves no margin.
    const SupportCheck bad = support_upper_check(s, bar, 0.0);
    CHECK(bad.conclusive);
    CHECK_FALSE(bad.pass);
    CHECK_FALSE(bad.note.empty());
  }

  NodeSolution trapped;
  ProblemParams pp = reference_params();
  pp.lambda = 10.0;
  trapped.trajectory = std::make_shared<const Trajectory>(integrate(pp, nl));
  const SupportCheck inc = support_upper_check(trapped, bar);
  CHECK_FALSE(inc.conclusive);
  CHECK_FALSE(inc.pass);
}

TEST_CASE("size bounds bracket the measured radius") {
  const Nonlinearity nl = reference();
  ProblemParams pp = reference_params();
  IntegrateOptions io;
  io.stop_on_trap = false;
  for (double lambda : {10.0, 30.0, 100.0}) {
    CAPTURE(lambda);
    const SizeBounds sb = size_bounds(lambda, 0.904, nl, 2.0, 3.0);
    CHECK(sb.S_lo > 0.0);
    CHECK(sb.S_lo <= sb.S_hi);
    CHECK(sb.r_support_lo > 0.0);
    CHECK(sb.F_bar == doctest::Approx(5.0 / 12.0).epsilon(1e-12));
    pp.lambda = lambda;
    pp.r_max = 20.0;
    const BoundReport rep = bound_report(sb, integrate(pp, nl, io));
    REQUIRE(rep.S_measured.has_value());
    CHECK(rep.S_lo <= *rep.S_measured);
    CHECK(*rep.S_measured <= rep.S_hi);
    CHECK(rep.pass);
  }
  CHECK_THROWS_AS(size_bounds(1.2, 0.904, nl, 2.0, 3.0), DomainError);
  CHECK_THROWS_AS(size_bounds(10.0, 1.0, nl, 2.0, 3.0), DomainError);
}

TEST_CASE("size bound S matches its closed form at p = 2") {
  // S^2 = 2 N (1 - theta) lambda / f(lambda) for the upper end.
  const Nonlinearity nl = reference();
  const SizeBounds sb = size_bounds(30.0, 0.904, nl, 2.0, 3.0);
  const double hi = std::sqrt(3.0 * 2.0 * 0.096 * 30.0 / nl.f(0.904 * 30.0));
  const double lo = std::sqrt(3.0 * 2.0 * 0.096 * 30.0 / nl.f(30.0));
  CHECK(sb.S_hi == doctest::Approx(hi).epsilon(1e-12));
  CHECK(sb.S_lo == doctest::Approx(lo).epsilon(1e-12));
}

TEST_CASE("node solutions clear the support lower bound") {
  const Nonlinearity nl = reference();
  for (int k = 0; k <= 2; ++k) {
    CAPTURE(k);
    const NodeSolution s = find_lambda_k(k, reference_params(), nl);
    if (nl.f(0.904 * s.lambda_k) <= 0.0 || nl.F(0.904 * s.lambda_k) <= 0.0) continue;
    const SizeBounds sb = size_bounds(s.lambda_k, 0.904, nl, 2.0, 3.0);
    const BoundReport rep = bound_report(sb, *s.trajectory, s.r_support);
    CHECK(rep.pass);
    CHECK(s.r_support >= sb.r_support_lo);
  }
}

TEST_CASE("first level radius") {
  ProblemParams pp = reference_params();
  pp.lambda = 10.0;
  const Trajectory t = integrate(pp, reference());
  const auto r = first_level_radius(t, 9.0);
  REQUIRE(r.has_value());
  CHECK(std::abs(t.at(*r).u - 9.0) <= 1e-9);
  CHECK_FALSE(first_level_radius(t, 11.0).has_value());
}

TEST_CASE("default r_max") {
  const Nonlinearity nl = reference();
  const BarrierProfile bar = barrier(nl, 2.0);
  CHECK(default_r_max(nl, 2.0, 3.0, 1.1 * std::pow(8.0 / 3.0, 0.4), 0.904, bar) ==
        doctest::Approx(10.0 * kBarrierTime));
  const SizeBounds sb = size_bounds(50.0, 0.904, nl, 2.0, 3.0);
  CHECK(default_r_max(nl, 2.0, 3.0, 50.0, 0.904, bar) ==
        doctest::Approx(4.0 * sb.r_support_lo + 10.0 * kBarrierTime));
}

TEST_CASE("energy growth probe") {
  const Nonlinearity nl = reference();
  const RotationCertificate cert = rotation_constants(nl, 2.0, 3.0, 1.0 / 16.0);
  const double R = cert.r0 + 3.5 * M_PI / cert.omega;
  const auto rows = energy_growth_probe(R, {100.0, 200.0}, reference_params(), nl, cert);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].increased);
  CHECK(rows[1].min_E > rows[0].min_E);
  CHECK(rows[0].min_E < 0.0);

  const auto big = energy_growth_probe(R, {1e6}, reference_params(), nl, cert);
  REQUIRE(big.size() == 1);
  CHECK(big[0].rho_certified);
  CHECK(big[0].min_rho >= cert.sigma0 * cert.sigma0);
  CHECK(big[0].node_lower_bound == static_cast<int>(std::floor(cert.omega * (R - cert.r0) / M_PI)) - 1);
  CHECK(big[0].node_lower_bound == 2);
  CHECK(big[0].nodes >= big[0].node_lower_bound);

  const auto eq = energy_growth_probe(10.0, {1.0}, reference_params(), nl);
  CHECK(eq[0].min_E == doctest::Approx(nl.F(1.0)).epsilon(1e-12));
}

}  // TEST_SUITE
