#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "plshoot/powers.hpp"
#include "plshoot/ptrig.hpp"

using namespace plshoot;

TEST_SUITE("ptrig") {

TEST_CASE("pi_2 is pi and p = 2 reduces to sin and cos") {
  const PTrig trig(PExponent(2.0));
  CHECK(std::abs(trig.half_period() - M_PI) <= 1e-12);
  for (double t : {0.0, 0.3, 1.0, 2.5, 4.0, 6.0, -1.2}) {
    const SinCos sc = trig.sincos(t);
    CHECK(std::abs(sc.sin - std::sin(t)) <= 1e-12);
    CHECK(std::abs(sc.cos - std::cos(t)) <= 1e-12);
  }
}

TEST_CASE("half period agrees with the oscillator period") {
  for (double p : {1.5, 2.5, 3.0}) {
    CAPTURE(p);
    CHECK(std::abs(half_period(PExponent(p)) - testing::oracle_half_period(p)) <= 1e-8);
  }
}

TEST_CASE("quarter point values") {
  for (double p : {1.5, 2.0, 3.0}) {
    const PTrig trig{PExponent(p)};
    const SinCos top = trig.sincos(0.5 * trig.half_period());
    CHECK(std::abs(top.cos) <= 1e-12);
    CHECK(top.sin == doctest::Approx(trig.sin_max()).epsilon(1e-12));
    // Phi_q(sin_max) = 1/p.
    CHECK(Phi(trig.sin_max(), trig.q()) == doctest::Approx(1.0 / p).epsilon(1e-12));
    const SinCos half = trig.sincos(trig.half_period());
    CHECK(half.cos == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(half.sin) <= 1e-12);
  }
}

TEST_CASE("origin and axes in polar form") {
  const PTrig trig(PExponent(2.5));
  const PolarState o = trig.cartesian_to_polar(0.0, 0.0);
  CHECK(o.rho == 0.0);
  CHECK(o.theta == 0.0);
  const PolarState east = trig.cartesian_to_polar(2.0, 0.0);
  CHECK(east.theta == doctest::Approx(0.0));
  CHECK(east.rho == doctest::Approx(std::pow(2.0, 2.5)));
  const PolarState west = trig.cartesian_to_polar(-1.0, 0.0);
  CHECK(west.theta == doctest::Approx(trig.half_period()).epsilon(1e-13));
}

TEST_CASE("rho is p [Phi_p(u) + Phi_q(v)]") {
  const PTrig trig(PExponent(3.0));
  const double u = -0.7;
  const double v = 1.9;
  CHECK(trig.rho(u, v) == doctest::Approx(3.0 * (Phi(u, 3.0) + Phi(v, 1.5))).epsilon(1e-14));
}

TEST_CASE("exponent validation") {
  CHECK_THROWS_AS(PExponent(1.0), DomainError);
  CHECK_THROWS_AS(PExponent(0.5), DomainError);
  CHECK_THROWS_AS(PExponent(std::nan("")), DomainError);
  CHECK(PExponent(4.0).q() == doctest::Approx(4.0 / 3.0));
}

}  // TEST_SUITE
