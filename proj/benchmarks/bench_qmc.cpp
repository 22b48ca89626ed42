#include <benchmark/benchmark.h>

#include "nodegen/qmc.hpp"

using namespace nodegen;

static void BM_TabulateLattice(benchmark::State& state) {
  const auto params = LatticeParams::golden();
  for (auto _ : state)
    benchmark::DoNotOptimize(tabulate_lattice_separation(static_cast<std::size_t>(state.range(0)), params, 3));
}
BENCHMARK(BM_TabulateLattice)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_TorusMinimizer(benchmark::State& state) {
  auto params = TorusMinimizerParams::for_dimension(3);
  params.restarts = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(periodic_riesz_minimizer(static_cast<std::size_t>(state.range(0)), params, 3));
}
BENCHMARK(BM_TorusMinimizer)->Arg(20)->Unit(benchmark::kMillisecond);
