// Serial reference against the OpenMP path for the two per-point heavy curves.
#include <benchmark/benchmark.h>

#include "vrabi/curves.hpp"

namespace {

using namespace vrabi;

const PhysicalParams kParams = PhysicalParams::reference();
const OpenCavityParams kRates{17.73, 17.73, 0.07 * kParams.g, 0.0466};

void nstep(benchmark::State& state, Execution exec) {
  const auto times = time_grid(1e-6, 500e-6, 10e-6);
  const ModelKind kind = OpenCavity{kRates.rates()};
  for (auto _ : state)
    benchmark::DoNotOptimize(nstep_pg_curve(kind, kParams, GaussianProfile{}, times, 2001, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(times.size()));
}

void quadrature(benchmark::State& state, Execution exec) {
  const auto times = time_grid(0.0, 500e-6, 5e-6);
  for (auto _ : state)
    benchmark::DoNotOptimize(quadrature_pg_curve(kRates, kParams, GaussianProfile{}, 2.37e-6, times, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(times.size()));
}

BENCHMARK_CAPTURE(nstep, serial, Execution::Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(nstep, parallel, Execution::Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(quadrature, serial, Execution::Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(quadrature, parallel, Execution::Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
