#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "plshoot/powers.hpp"
#include "plshoot/shoot.hpp"

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

const double kA = std::pow(8.0 / 3.0, 0.4);

// Frozen from find_lambda_k (unchanged to 1e-10 for rel_tol down to 1e-12).
constexpr double kLambda[] = {4.71079656254577, 15.1324447981907, 31.0925037080174, 52.5440342216614};

// Sign changes of u on a uniform grid of [0, 12], independent integrator.
int oracle_nodes(double lambda) {
  const Nonlinearity nl = reference();
  std::vector<double> radii;
  for (int i = 1; i <= 6000; ++i) radii.push_back(0.002 * i);
  const auto u = testing::oracle_u(3.0, 2.0, lambda, [&](double x) { return nl.f(x); }, radii, 1e-15, 1e-14);
  int n = 0;
  for (std::size_t i = 1; i < u.size(); ++i) n += (u[i - 1] > 0.0) != (u[i] > 0.0);
  return n;
}

const std::vector<NodeSolution>& solutions() {
  static const std::vector<NodeSolution> sols = [] {
    std::vector<NodeSolution> v;
    for (int k = 0; k <= 3; ++k) v.push_back(find_lambda_k(k, reference_params(), reference()));
    return v;
  }();
  return sols;
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
  return g;
}

}  // namespace

TEST_SUITE("shoot") {

TEST_CASE("classification examples") {
  const Nonlinearity nl = reference();
  const ProblemParams pp = reference_params();
  const ShootClass just_above = classify(kA + 0.01, pp, nl);
  CHECK(just_above.kind == ShootKind::Ak);
  CHECK(just_above.k == 0);
  CHECK(std::isfinite(just_above.r_energy_zero));

  const ShootClass big = classify(1e3, pp, nl);
  CHECK(big.kind == ShootKind::Ak);
  CHECK(big.k >= 3);

  const ShootClass low = classify(0.5 * kA, pp, nl);
  CHECK(low.kind == ShootKind::Undetermined);
  CHECK_FALSE(low.note.empty());
  CHECK(low.trajectory == nullptr);
}

TEST_CASE("sweep below A is undetermined") {
  for (const SweepRow& row : sweep(grid(0.1, 0.99 * kA, 7), reference_params(), reference())) {
    CHECK(row.cls.kind == ShootKind::Undetermined);
    CHECK_FALSE(row.cls.note.empty());
  }
}

TEST_CASE("sweep inside one A_k keeps k") {
  for (const SweepRow& row : sweep(grid(6.0, 14.0, 9), reference_params(), reference())) {
    CAPTURE(row.cls.lambda);
    CHECK(row.cls.kind == ShootKind::Ak);
    CHECK(row.cls.k == 1);
  }
}

TEST_CASE("refined sweep steps node count by one") {
  SweepOptions so;
  so.refine = true;
  const auto rows = sweep({5.0, 40.0, 80.0}, reference_params(), reference(), so);
  REQUIRE(rows.size() > 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CAPTURE(rows[i].cls.lambda);
    CHECK(rows[i].cls.lambda > rows[i - 1].cls.lambda);
    CHECK(rows[i].cls.k - rows[i - 1].cls.k >= 0);
    CHECK(rows[i].cls.k - rows[i - 1].cls.k <= 1);
  }
  CHECK(rows.back().cls.k - rows.front().cls.k >= 3);
}

TEST_CASE("sweep rejects an unsorted grid") {
  CHECK_THROWS_AS(sweep({3.0, 2.0}, reference_params(), reference()), ConfigError);
}

TEST_CASE("lambda_k sequence") {
  const auto& sols = solutions();
  const ProblemParams pp = reference_params();
  for (int k = 0; k <= 3; ++k) {
    CAPTURE(k);
    const NodeSolution& s = sols[k];
    CHECK(s.k == k);
    CHECK_FALSE(s.near_Ik);
    if (k > 0) CHECK(s.lambda_k > sols[k - 1].lambda_k);
    CHECK(s.lambda_k == doctest::Approx(kLambda[k]).epsilon(1e-9));
    CHECK(s.bracket_lo <= s.lambda_k);
    CHECK(s.lambda_k <= s.bracket_hi);
    REQUIRE(s.trajectory != nullptr);
    CHECK(static_cast<int>(s.trajectory->count(EventKind::SimpleZero)) == k);
    CHECK(s.closest_approach <= 1e-7);
    CHECK(s.E_support <= 1e-9);
    CHECK(s.r_support == doctest::Approx(s.trajectory->r_end()));
  }
  for (const Sample& x : sols[0].trajectory->samples()) CHECK(x.state.u >= -pp.tol.event_tol);
}

TEST_CASE("lambda_k against an independent bisection") {
  const auto& sols = solutions();
  for (int k = 0; k <= 3; ++k) {
    CAPTURE(k);
    double lo = sols[k].lambda_k * (1.0 - 1e-3);
    double hi = sols[k].lambda_k * (1.0 + 1e-3);
    REQUIRE(oracle_nodes(lo) == k);
    REQUIRE(oracle_nodes(hi) == k + 1);
    while (hi - lo > 1e-9 * lo) {
      const double mid = 0.5 * (lo + hi);
      (oracle_nodes(mid) <= k ? lo : hi) = mid;
    }
    // Without double-zero handling the oracle resolves lambda_k to about 1e-7.
    CHECK(std::abs(0.5 * (lo + hi) - sols[k].lambda_k) <= 2e-7 * sols[k].lambda_k);
  }
}

TEST_CASE("openness just around lambda_k") {
  const Nonlinearity nl = reference();
  const ProblemParams pp = reference_params();
  for (int k = 0; k <= 2; ++k) {
    CAPTURE(k);
    const double lk = solutions()[k].lambda_k;
    const ShootClass below = classify(lk * (1.0 - 1e-6), pp, nl);
    const ShootClass above = classify(lk * (1.0 + 1e-6), pp, nl);
    CHECK(below.kind == ShootKind::Ak);
    CHECK(below.k == k);
    CHECK(above.kind == ShootKind::Ak);
    CHECK(above.k == k + 1);
  }
}

TEST_CASE("zero extension") {
  const NodeSolution& s = solutions()[1];
  const NodeSolution e = extend_compact_support(s, s.r_support + 10.0);
  CHECK(e.extended);
  REQUIRE(e.trajectory != nullptr);
  CHECK(e.trajectory->r_end() == doctest::Approx(s.r_support + 10.0));
  for (double r = s.r_support + 0.1; r < s.r_support + 10.0; r += 0.5) {
    CHECK(e.trajectory->at(r).u == 0.0);
    CHECK(e.trajectory->energy_at(r) == 0.0);
  }
  CHECK(e.trajectory->count(EventKind::SimpleZero) == s.trajectory->count(EventKind::SimpleZero));
  CHECK_THROWS_AS(extend_compact_support(s, s.r_support - 1.0), ContractError);

  NodeSolution not_ik = s;
  not_ik.trajectory = classify(10.0, reference_params(), reference()).trajectory;
  CHECK_THROWS_AS(extend_compact_support(not_ik, 100.0), ContractError);
}

TEST_CASE("asymptotic limits") {
  const Nonlinearity nl = reference();
  ProblemParams pp = reference_params(1000.0);
  IntegrateOptions io;
  io.stop_on_trap = false;

  pp.lambda = 3.0;
  const AsymptoticReport zero_node = asymptotic_limit(integrate(pp, nl, io), nl);
  REQUIRE(zero_node.ell.has_value());
  CHECK(*zero_node.ell == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(zero_node.u_tail - 1.0) <= 1e-3);
  CHECK(std::abs(zero_node.E_tail - nl.F(1.0)) <= 1e-3);

  pp.lambda = 10.0;
  const AsymptoticReport one_node = asymptotic_limit(integrate(pp, nl, io), nl);
  REQUIRE(one_node.ell.has_value());
  CHECK(*one_node.ell == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(std::abs(one_node.u_tail + 1.0) <= 1e-3);
  CHECK(std::abs(one_node.E_tail - nl.F(-1.0)) <= 1e-3);

  const AsymptoticReport ik = asymptotic_limit(*solutions()[0].trajectory, nl);
  CHECK_FALSE(ik.ell.has_value());
  CHECK_FALSE(ik.note.empty());
}

TEST_CASE("bisection closes in on the double zero") {
  const Nonlinearity nl = reference();
  SearchOptions so;
  so.continue_past_tol = false;
  double prev = INFINITY;
  for (double tol : {1e-5, 1e-7, 1e-9}) {
    CAPTURE(tol);
    so.lambda_tol_rel = tol;
    const NodeSolution s = find_lambda_k(1, reference_params(), nl, so);
    CHECK((s.bracket_hi - s.bracket_lo) <= tol * s.lambda_k * 1.0001);
    CHECK(s.closest_approach <= prev);
    prev = s.closest_approach;
  }
}

TEST_CASE("search contracts") {
  CHECK_THROWS_AS(find_lambda_k(-1, reference_params(), reference()), ConfigError);
  CHECK_THROWS_AS(find_lambda_k(2, reference_params(2.0), reference()), SearchError);
}

}  // TEST_SUITE
