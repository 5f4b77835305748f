#include <benchmark/benchmark.h>

#include <sstream>

#include "ambr/event_queue.hpp"
#include "ambr/scenario.hpp"
#include "ambr/simulation.hpp"

namespace {

void BM_EventQueueChurn(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ambr::EventQueue q;
    long fired = 0;
    for (int i = 0; i < n; ++i)
      q.schedule(static_cast<double>((i * 7919) % n), [&] { ++fired; });
    q.run_until(static_cast<double>(n));
    benchmark::DoNotOptimize(fired);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EventQueueChurn)->Arg(1 << 12)->Arg(1 << 16);

void BM_SimulationRun(benchmark::State& state) {
  ambr::SimConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  cfg.sim_time = 20.0;
  cfg.num_flows = 5;
  cfg.cbr_rate = 2.0;
  for (auto _ : state) {
    ambr::Simulation sim(cfg, 1);
    ambr::RunResult r = sim.run();
    benchmark::DoNotOptimize(r.radio_tx_total);
  }
}
BENCHMARK(BM_SimulationRun)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_AnalyticSweep(benchmark::State& state) {
  ambr::AnalyticSweepSpec spec;
  spec.e_n = {1, 2, 4, 8, 16, 32};
  spec.p0 = {0.1, 0.3, 0.5, 0.7, 0.9};
  spec.lambda = {0.5, 1.0, 2.0};
  spec.mu = {0.5, 1.0, 2.0};
  for (auto _ : state) {
    std::ostringstream out;
    ambr::emit_analytic_csv(spec, out);
    benchmark::DoNotOptimize(out.str().size());
  }
}
BENCHMARK(BM_AnalyticSweep);

}  // namespace

BENCHMARK_MAIN();
