// Serial reference kernel against the OpenMP kernel on the same workload.

#include <benchmark/benchmark.h>

#include "tailreg/harness.hpp"

using namespace tailreg;

namespace {

harness::ExperimentConfig workload(std::int64_t reps, int workers, bool bernoulli) {
  harness::ExperimentConfig c;
  if (bernoulli) {
    const auto bern = expfam::Family::bernoulli();
    c.arms = {envproc::IidExpFam::make(bern, 0.5), envproc::IidExpFam::make(bern, 0.4)};
    c.policy = harness::KlUcbPolicy{policy::DivergenceSpec::family_kl(bern)};
  } else {
    c.arms = {envproc::IidGaussian::make(0.1, 1.0), envproc::IidGaussian::make(0.0, 1.0)};
  }
  c.horizon = 1000;
  c.replications = reps;
  c.thresholds = {{0.1, 0.5}, true};
  c.workers = workers;
  c.seed = 3;
  return c;
}

void set_counters(benchmark::State& state, const harness::ExperimentConfig& c) {
  state.SetItemsProcessed(state.iterations() * c.replications * c.horizon);
}

void BM_SerialGaussian(benchmark::State& state) {
  const auto c = workload(state.range(0), 1, false);
  for (auto _ : state) benchmark::DoNotOptimize(harness::count_hits_serial(c));
  set_counters(state, c);
}

void BM_ParallelGaussian(benchmark::State& state) {
  const auto c = workload(state.range(0), static_cast<int>(state.range(1)), false);
  for (auto _ : state) benchmark::DoNotOptimize(harness::count_hits(c));
  set_counters(state, c);
}

void BM_SerialBernoulli(benchmark::State& state) {
  const auto c = workload(state.range(0), 1, true);
  for (auto _ : state) benchmark::DoNotOptimize(harness::count_hits_serial(c));
  set_counters(state, c);
}

void BM_ParallelBernoulli(benchmark::State& state) {
  const auto c = workload(state.range(0), static_cast<int>(state.range(1)), true);
  for (auto _ : state) benchmark::DoNotOptimize(harness::count_hits(c));
  set_counters(state, c);
}

}  // namespace

BENCHMARK(BM_SerialGaussian)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelGaussian)->Args({2000, 1})->Args({2000, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SerialBernoulli)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelBernoulli)->Args({200, 1})->Args({200, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
