#include <benchmark/benchmark.h>

#include "vfc/dcf.hpp"
#include "vfc/error.hpp"
#include "vfc/simulator.hpp"
#include "vfc/solver.hpp"

namespace {

vfc::SystemConfig with_k(int k) {
  vfc::SystemConfig cfg;
  cfg.k_max = k;
  return cfg;
}

void BM_FixedPoint(benchmark::State& state) {
  const vfc::dcf::DcfParams p;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(vfc::dcf::solve_fixed_point(p, n));
}
BENCHMARK(BM_FixedPoint)->Arg(4)->Arg(11)->Arg(32);

void BM_MonteCarloBackoff(benchmark::State& state) {
  const vfc::dcf::DcfParams p;
  for (auto _ : state) benchmark::DoNotOptimize(vfc::dcf::monte_carlo_backoff(p, 0.3, 100'000, 1));
  state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_MonteCarloBackoff)->Unit(benchmark::kMillisecond);

void BM_BuildModel(benchmark::State& state) {
  const auto cfg = with_k(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const auto sc = vfc::Scenario::build(cfg);
    benchmark::DoNotOptimize(vfc::uniformize(cfg, vfc::build_model(sc)));
  }
}
BENCHMARK(BM_BuildModel)->Arg(4)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

// Cost of a fixed number of value-iteration sweeps.
void BM_ValueIterationSweeps(benchmark::State& state) {
  const auto cfg = with_k(static_cast<int>(state.range(0)));
  const auto sc = vfc::Scenario::build(cfg);
  const auto um = vfc::uniformize(cfg, vfc::build_model(sc));
  vfc::SolveOptions opt;
  opt.max_sweeps = 100;
  for (auto _ : state) {
    try {
      vfc::value_iteration(um, cfg.epsilon, opt);
    } catch (const vfc::ConvergenceError&) {
    }
  }
  state.SetItemsProcessed(state.iterations() * 100 * static_cast<std::int64_t>(um.row_count()));
}
BENCHMARK(BM_ValueIterationSweeps)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_EvaluatePolicy(benchmark::State& state) {
  const auto cfg = with_k(static_cast<int>(state.range(0)));
  const auto sc = vfc::Scenario::build(cfg);
  const auto um = vfc::uniformize(cfg, vfc::build_model(sc));
  const auto pi = vfc::equal_probability_policy(cfg, sc.index);
  for (auto _ : state) benchmark::DoNotOptimize(vfc::evaluate_policy(um, pi));
}
BENCHMARK(BM_EvaluatePolicy)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_SimulatorReplication(benchmark::State& state) {
  const auto cfg = with_k(6);
  const auto sc = vfc::Scenario::build(cfg);
  const auto pi = vfc::greedy_policy(cfg, sc.index);
  vfc::SimConfig sim;
  sim.horizon = 100.0;
  std::int64_t events = 0;
  std::uint64_t seed = 0;
  for (auto _ : state) events += vfc::run_replication(sc, pi, sim, ++seed).events;
  state.SetItemsProcessed(events);
}
BENCHMARK(BM_SimulatorReplication)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
