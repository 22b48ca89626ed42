#include <benchmark/benchmark.h>

#include "nodegen/qmc.hpp"
#include "nodegen/repel.hpp"

using namespace nodegen;

namespace {

NodeSet halton_nodes(std::size_t n) {
  PointSet pts = halton(n, 3);
  for (double& v : pts.coords()) v = 0.05 + 0.9 * v;
  return NodeSet(pts);
}

}  // namespace

static void BM_NeighborLists(benchmark::State& state) {
  const NodeSet nodes = halton_nodes(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_neighbor_lists(nodes.positions, 30));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NeighborLists)->Arg(20000)->Unit(benchmark::kMillisecond);

static void BM_RepelStep(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const NodeSet nodes = halton_nodes(n);
  RepelConfig config;
  config.use_full_gradient = state.range(1) != 0;
  const Domain domain = cube_domain(Box::unit(3));
  RadialDensity rho;
  rho.eval = [](ConstPoint x) { return 0.02 * (1.0 + 0.5 * x[0]); };
  const NeighborLists lists = build_neighbor_lists(nodes.positions, config.K);
  for (auto _ : state) benchmark::DoNotOptimize(repel_step(nodes, 0, config, domain, rho, lists));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RepelStep)->Args({20000, 0})->Args({20000, 1})->Unit(benchmark::kMillisecond);
