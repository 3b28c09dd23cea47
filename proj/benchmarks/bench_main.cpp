#include <benchmark/benchmark.h>

#include <random>

#include "fairsignal/ironing.hpp"
#include "fairsignal/oracles.hpp"
#include "fairsignal/split_match.hpp"

using namespace fairsignal;

namespace {

// Values 1..n with integer weights drawn from a fixed seed.
ValueDistribution instance(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_int_distribution<long> w(1, 20);
  std::vector<Rational> values, weights;
  for (std::size_t i = 0; i < n; ++i) {
    values.push_back(Rational(static_cast<long>(i + 1)));
    weights.push_back(Rational(w(rng)));
  }
  return ValueDistribution::from_weights(std::move(values), std::move(weights));
}

void BM_SplitAndMatch(benchmark::State& state) {
  ValueDistribution d = instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(split_and_match(d));
}
BENCHMARK(BM_SplitAndMatch)->RangeMultiplier(4)->Range(4, 256);

void BM_BuildFairScheme(benchmark::State& state) {
  ValueDistribution d = instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_fair_scheme(d));
}
BENCHMARK(BM_BuildFairScheme)->RangeMultiplier(4)->Range(4, 256);

void BM_SortedPrefix(benchmark::State& state) {
  StepFunction f = build_fair_scheme(instance(static_cast<std::size_t>(state.range(0)))).final.surplus().step();
  Rational m(1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(sorted_prefix(f, m));
}
BENCHMARK(BM_SortedPrefix)->RangeMultiplier(4)->Range(4, 256);

void BM_BuyerOptimalLp(benchmark::State& state) {
  ValueDistribution d = instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(buyer_optimal_scheme(d));
}
BENCHMARK(BM_BuyerOptimalLp)->DenseRange(2, 8, 2);

void BM_AdversaryLp(benchmark::State& state) {
  ValueDistribution d = instance(static_cast<std::size_t>(state.range(0)));
  Rational m(1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(adversary_sorted_prefix(d, m));
}
BENCHMARK(BM_AdversaryLp)->DenseRange(2, 8, 2);

}  // namespace

BENCHMARK_MAIN();
