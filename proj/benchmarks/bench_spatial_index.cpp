#include <benchmark/benchmark.h>

#include "nodegen/qmc.hpp"
#include "nodegen/spatial_index.hpp"

using namespace nodegen;

static void BM_KdTreeBuild(benchmark::State& state) {
  const PointSet pts = halton(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(KdTree(pts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KdTreeBuild)->Arg(10000)->Arg(100000);

static void BM_KdTreeKnn(benchmark::State& state) {
  const PointSet pts = halton(100000, 3);
  const KdTree tree(pts);
  const auto k = static_cast<std::size_t>(state.range(0));
  std::vector<std::uint32_t> idx;
  std::vector<double> d2;
  std::size_t i = 0;
  for (auto _ : state) {
    tree.knn_into(pts[i], k, static_cast<std::uint32_t>(i), idx, d2);
    benchmark::DoNotOptimize(d2.data());
    i = (i + 7919) % pts.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_KdTreeKnn)->Arg(1)->Arg(30)->Arg(80);
