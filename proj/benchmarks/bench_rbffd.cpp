#include <benchmark/benchmark.h>

#include "nodegen/qmc.hpp"
#include "nodegen/rbffd.hpp"
#include "nodegen/spatial_index.hpp"

using namespace nodegen;

static void BM_StencilCondition(benchmark::State& state) {
  const PointSet pts = halton(1000, 3);
  const KdTree tree(pts);
  const double center[3] = {0.5, 0.5, 0.5};
  const auto nn = tree.knn(ConstPoint(center, 3), static_cast<std::size_t>(state.range(0)));
  PointSet stencil(3);
  for (auto i : nn.indices) stencil.push_back(pts[i]);
  const auto ops = first_and_second_partials(3);
  for (auto _ : state) {
    const auto sys = assemble_phs_system(stencil, ConstPoint(center, 3), 2, ops);
    benchmark::DoNotOptimize(symmetric_condition_number(sys.matrix));
  }
}
BENCHMARK(BM_StencilCondition)->Arg(40)->Arg(80);

static void BM_SolveWeights(benchmark::State& state) {
  const PointSet pts = halton(1000, 3);
  const KdTree tree(pts);
  const double center[3] = {0.5, 0.5, 0.5};
  const auto nn = tree.knn(ConstPoint(center, 3), static_cast<std::size_t>(state.range(0)));
  PointSet stencil(3);
  for (auto i : nn.indices) stencil.push_back(pts[i]);
  const auto sys = assemble_phs_system(stencil, ConstPoint(center, 3), 2, first_and_second_partials(3));
  for (auto _ : state) benchmark::DoNotOptimize(solve_weights(sys));
}
BENCHMARK(BM_SolveWeights)->Arg(40)->Arg(80);
