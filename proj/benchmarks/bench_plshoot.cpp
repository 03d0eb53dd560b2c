#include <benchmark/benchmark.h>

#include "plshoot/bounds.hpp"
#include "plshoot/ptrig.hpp"
#include "plshoot/shoot.hpp"

using namespace plshoot;

namespace {

Nonlinearity reference() { return make_power_family(1.5, 4.0, 2.0, 3.0); }

ProblemParams reference_params(double lambda) {
  ProblemParams pp;
  pp.lambda = lambda;
  return pp;
}

void BM_Sincos(benchmark::State& state) {
  const PTrig trig{PExponent(2.5)};
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(trig.sincos(t));
    t += 0.37;
  }
}
BENCHMARK(BM_Sincos);

void BM_HalfPeriod(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(half_period(PExponent(3.0)));
}
BENCHMARK(BM_HalfPeriod);

void BM_Integrate(benchmark::State& state) {
  const Nonlinearity nl = reference();
  const ProblemParams pp = reference_params(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate(pp, nl));
}
BENCHMARK(BM_Integrate)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Barrier(benchmark::State& state) {
  const Nonlinearity nl = reference();
  for (auto _ : state) benchmark::DoNotOptimize(barrier(nl, 2.0));
}
BENCHMARK(BM_Barrier)->Unit(benchmark::kMillisecond);

void BM_FindLambdaK(benchmark::State& state) {
  const Nonlinearity nl = reference();
  const ProblemParams pp = reference_params(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(find_lambda_k(static_cast<int>(state.range(0)), pp, nl));
}
BENCHMARK(BM_FindLambdaK)->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
