#include <benchmark/benchmark.h>

#include <omp.h>

#include "rnm/sweep.hpp"

namespace {

rnm::SweepSpec bench_spec() {
  rnm::SweepSpec s;
  s.lanes = {1, 2};
  s.nodes_per_lane = {30, 60};
  s.tx_ranges = {400, 700, 1000};
  s.n_seeds = 2;
  s.base.messages_total = 20;
  return s;
}

void BM_SweepSerial(benchmark::State& state) {
  const rnm::SweepSpec spec = bench_spec();
  for (auto _ : state) benchmark::DoNotOptimize(rnm::run_sweep_serial(spec));
  state.counters["runs"] = static_cast<double>(rnm::expand(spec).size() * spec.n_seeds);
}

void BM_SweepParallel(benchmark::State& state) {
  const rnm::SweepSpec spec = bench_spec();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rnm::run_sweep_parallel(spec, threads));
  state.counters["threads"] = threads;
}

void BM_SingleRun(benchmark::State& state) {
  rnm::ScenarioConfig c;
  c.lanes = 2;
  c.nodes_per_lane = 60;
  c.tx_range_m = static_cast<double>(state.range(0));
  c.protocol = state.range(1) ? rnm::ProtocolKind::Flooding : rnm::ProtocolKind::Rnmdp;
  c.messages_total = 20;
  for (auto _ : state) benchmark::DoNotOptimize(rnm::run(c));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepParallel)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime()
    ->Arg(1)
    ->Arg(2)
    ->Arg(4)
    ->Arg(omp_get_max_threads());
BENCHMARK(BM_SingleRun)->Unit(benchmark::kMillisecond)->Args({400, 0})->Args({400, 1})->Args({1000, 0})->Args({1000, 1});

BENCHMARK_MAIN();
