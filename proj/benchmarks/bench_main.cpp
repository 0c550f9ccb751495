#include <benchmark/benchmark.h>

#include "cfrag/compartment_model.hpp"
#include "cfrag/kernel.hpp"
#include "cfrag/lyapunov.hpp"
#include "cfrag/rng.hpp"
#include "cfrag/simulator.hpp"

using namespace cfrag;

namespace {

CompartmentModel all_ones() {
  return make_model4({1, 1, 1, 1, 1, 1, 0}, InflowDistribution::point_mass({0}), FragmentationKernel::binomial_half());
}

void BM_SimulateModel4(benchmark::State& state) {
  const auto m = all_ones();
  StopCondition stop;
  stop.event_budget = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 0, events = 0;
  for (auto _ : state) {
    const auto r = run_trajectory(m, PopulationState(1), stop, seed++);
    events += r.event_count;
    benchmark::DoNotOptimize(r.final_time);
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateModel4)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_PopulationGenerator(benchmark::State& state) {
  const auto m = all_ones();
  const auto V = CandidateFunction::population_weighted(1.0, {1.0});
  const auto f = V.as_population_function();
  Rng rng(1);
  const auto n = sample_population_state(1, static_cast<Count>(state.range(0)), static_cast<Count>(state.range(0)),
                                         4 * static_cast<Count>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(apply_population_generator(m, f, n).value);
}
BENCHMARK(BM_PopulationGenerator)->Arg(8)->Arg(30);

void BM_KernelSample(benchmark::State& state) {
  const auto k = FragmentationKernel::enzyme_substrate(0.2, 0, 1);
  const Complex x = {2, static_cast<Count>(state.range(0))};
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(sample_fragmentation(k, x, rng));
}
BENCHMARK(BM_KernelSample)->Arg(10)->Arg(1000);

void BM_OneEnzymeDriftScan(benchmark::State& state) {
  const auto f = CandidateFunction::recip_log();
  for (auto _ : state) {
    benchmark::DoNotOptimize(scan_one_enzyme_drift(1.0, 0.5, f, static_cast<Count>(state.range(0))).x_star);
  }
}
BENCHMARK(BM_OneEnzymeDriftScan)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
