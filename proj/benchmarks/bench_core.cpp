#include <benchmark/benchmark.h>

#include "cavcool/oracle.hpp"
#include "cavcool/rates.hpp"
#include "cavcool/resolvent.hpp"
#include "cavcool/scan.hpp"
#include "presets.hpp"

namespace {

void BM_DressedStates(benchmark::State& state) {
  const auto p = presets::strong_coupling();
  for (auto _ : state) benchmark::DoNotOptimize(cavcool::dressed_states(p));
}
BENCHMARK(BM_DressedStates);

void BM_TransitionRates(benchmark::State& state) {
  const auto p = presets::strong_coupling();
  for (auto _ : state) benchmark::DoNotOptimize(cavcool::transition_rates(p));
}
BENCHMARK(BM_TransitionRates);

void BM_RunScan(benchmark::State& state) {
  cavcool::ScanSpec s;
  s.base = presets::map_moderate_decay();
  const auto n = static_cast<std::size_t>(state.range(0));
  s.axis1 = {"Delta", -4.0, 4.0, n};
  s.axis2 = cavcool::Axis{"delta1", -60.0, 100.0, n};
  s.constraint = cavcool::Constraint::tpr_via_delta_c2;
  s.quantity = cavcool::Quantity::Gamma;
  for (auto _ : state) benchmark::DoNotOptimize(cavcool::run_scan(s, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n));
}
BENCHMARK(BM_RunScan)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_BuildGenerator(benchmark::State& state) {
  const auto p = presets::strong_coupling();
  cavcool::OracleConfig c;
  c.n_max = 1;
  c.m_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cavcool::build_generator(p, c));
}
BENCHMARK(BM_BuildGenerator)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
