#include <gtest/gtest.h>

#include <cmath>

#include "nodegen/domain.hpp"
#include "nodegen/error.hpp"
#include "nodegen/layout.hpp"
#include "oracles.hpp"

using namespace nodegen;

namespace {

const QmcSource& golden_source() {
  static const QmcSource s = QmcSource::lattice(100, LatticeParams::golden(), 3);
  return s;
}

const QmcSource& riesz_source() {
  static const QmcSource s =
      QmcSource::minimizers(100, TorusMinimizerParams::for_dimension(3), 3, default_fixture_dir());
  return s;
}

Domain centered_ball(double r) {
  const double c[3] = {0.5, 0.5, 0.5};
  return ball_domain(ConstPoint(c, 3), r);
}

}  // namespace

TEST(VoxelGrid, TilesTheCubeWithCentersHalfASideIn) {
  VoxelGrid g(3, 4);
  EXPECT_EQ(g.voxel_count(), 64u);
  for (std::size_t m = 0; m < g.voxel_count(); ++m) {
    const Vec c = g.corner(m), z = g.center(m);
    EXPECT_EQ(g.flat_index(g.multi_index(m)), m);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_DOUBLE_EQ(z[k], c[k] + 0.125);
      EXPECT_GE(c[k], 0.0);
      EXPECT_LE(c[k] + 0.25, 1.0 + 1e-15);
    }
  }
  EXPECT_THROW(VoxelGrid(3, 0), ConfigError);
}

TEST(SelectVoxels, WholeCubeSelectsEverything) {
  for (std::size_t M : {1u, 3u, 8u}) {
    VoxelGrid g(3, M);
    select_voxels(g, cube_domain(Box::unit(3)), Adjacency::Face);
    for (auto s : g.selected) EXPECT_EQ(s, 1);
  }
}

TEST(SelectVoxels, TinyBallAtSharedCornerSelectsAllEight) {
  VoxelGrid g(3, 2);
  select_voxels(g, centered_ball(0.05), Adjacency::Face);
  for (auto s : g.selected) EXPECT_EQ(s, 1);
}

TEST(SelectVoxels, MatchesBruteForceCornerScan) {
  const Domain ball = centered_ball(0.3);
  for (Adjacency adj : {Adjacency::Face, Adjacency::Vertex}) {
    VoxelGrid g(3, 10);
    select_voxels(g, ball, adj);
    const auto has_inside_corner = [&](long i, long j, long k) {
      for (int v = 0; v < 8; ++v) {
        const double x[3] = {(i + (v & 1)) / 10.0, (j + ((v >> 1) & 1)) / 10.0, (k + ((v >> 2) & 1)) / 10.0};
        if (ball.contains(ConstPoint(x, 3))) return true;
      }
      return false;
    };
    std::size_t selected = 0, intersecting = 0;
    for (long i = 0; i < 10; ++i)
      for (long j = 0; j < 10; ++j)
        for (long k = 0; k < 10; ++k) {
          bool want = false;
          for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
              for (int c = -1; c <= 1; ++c) {
                const int nz = (a != 0) + (b != 0) + (c != 0);
                if (adj == Adjacency::Face && nz > 1) continue;
                const long p = i + a, q = j + b, r = k + c;
                if (p < 0 || q < 0 || r < 0 || p > 9 || q > 9 || r > 9) continue;
                want = want || has_inside_corner(p, q, r);
              }
          const std::size_t m = g.flat_index({std::size_t(i), std::size_t(j), std::size_t(k)});
          EXPECT_EQ(g.selected[m] != 0, want);
          selected += g.selected[m];
          // A voxel meets the ball iff its closest point does.
          double d2 = 0.0;
          for (long v : {i, j, k}) {
            const double lo = v / 10.0, hi = (v + 1) / 10.0;
            const double t = std::clamp(0.5, lo, hi) - 0.5;
            d2 += t * t;
          }
          if (d2 < 0.09) {
            ++intersecting;
            EXPECT_TRUE(g.selected[m]);
          }
        }
    EXPECT_GT(selected, intersecting);
    EXPECT_LT(selected, 1000u);
  }
}

TEST(VoxelNodeCount, Examples) {
  const LambdaInverse& lambda = golden_source().lambda();
  EXPECT_EQ(voxel_node_count(0.15, 10, lambda), 0u);
  EXPECT_EQ(voxel_node_count(lambda.mean_separation(20) / 10.0, 10, lambda), 20u);
  EXPECT_THROW(voxel_node_count(0.0, 10, lambda), DomainError);
}

TEST(VoxelNodeCount, ConstantDensityTotal) {
  const QmcSource& src = golden_source();
  LayoutConfig cfg;
  cfg.M = 6;
  const RadialDensity rho = constant_density(0.04);
  const LayoutPlan plan = plan_layout(cube_domain(Box::unit(3)), rho, cfg, src);
  EXPECT_EQ(plan.predicted_nodes, 216u * src.lambda()(0.04 * 6));
}

TEST(FillVoxel, EmptyAndSingleRieszPointAtCenter) {
  VoxelGrid g(3, 5);
  EXPECT_EQ(fill_voxel(g, 7, 0, golden_source(), 1.0, 1).size(), 0u);
  const PointSet one = fill_voxel(g, 7, 1, riesz_source(), 1.0, 1);
  ASSERT_EQ(one.size(), 1u);
  const Vec z = g.center(7);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(one[0][k], z[k], 1e-15);
}

TEST(FillVoxel, LatticeInsetMargin) {
  const std::size_t M = 7;
  VoxelGrid g(3, M);
  const double f = 1.0 - std::pow(100.0, -1.0 / 3.0);
  EXPECT_NEAR(f, 0.7846, 1e-4);
  const double margin = 0.5 * (1.0 - f) / M;
  EXPECT_NEAR(margin * M, 0.1077, 1e-4);
  for (std::size_t m : {0u, 100u, 342u})
    for (std::size_t n : {1u, 17u, 100u}) {
      const PointSet p = fill_voxel(g, m, n, golden_source(), 1.0, 9);
      ASSERT_EQ(p.size(), n);
      const Vec c = g.corner(m);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < 3; ++k) {
          EXPECT_GE(p[i][k] - c[k], margin - 1e-15);
          EXPECT_LE(p[i][k] - c[k], 1.0 / M - margin + 1e-15);
        }
    }
}

TEST(FillVoxel, PermutationIsSeededPerVoxel) {
  VoxelGrid g(3, 4);
  const auto a = fill_voxel(g, 5, 30, golden_source(), 1.0, 3);
  const auto b = fill_voxel(g, 5, 30, golden_source(), 1.0, 3);
  EXPECT_EQ(a, b);
}

TEST(FillVoxel, AdjacentRieszVoxelsKeepTheirDistance) {
  const std::size_t M = 3;
  for (std::size_t n : {8u, 20u, 50u, 100u}) {
    VoxelGrid g(3, M);
    const std::size_t a = g.flat_index({1, 1, 1});
    const double target = riesz_source().table().at(n).mean_sep / M;
    const PointSet pa = fill_voxel(g, a, n, riesz_source(), 1.0, 1);
    for (std::size_t k = 0; k < 3; ++k) {
      std::vector<std::size_t> idx{1, 1, 1};
      idx[k] = 2;
      const PointSet pb = fill_voxel(g, g.flat_index(idx), n, riesz_source(), 1.0, 1);
      double best = 1e9;
      for (std::size_t i = 0; i < pa.size(); ++i)
        for (std::size_t j = 0; j < pb.size(); ++j) best = std::min(best, oracle::dist(pa[i], pb[j]));
      EXPECT_GE(best, 0.75 * target) << "n=" << n;
    }
  }
}

TEST(Saturate, NothingToDoWithoutEmptyVoxels) {
  VoxelGrid g(3, 3);
  g.selected.assign(g.voxel_count(), 1);
  g.node_count.assign(g.voxel_count(), 2);
  const auto r = saturate(g, PointSet(3), constant_density(0.01));
  EXPECT_EQ(r.added.size(), 0u);
}

TEST(Saturate, SingleVoxelGetsItsCenter) {
  VoxelGrid g(3, 4);
  const std::size_t m = 21;
  g.selected[m] = 1;
  const auto r = saturate(g, PointSet(3), constant_density(0.6 / 4));
  ASSERT_EQ(r.added.size(), 1u);
  const Vec z = g.center(m);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(r.added[0][k], z[k]);
}

TEST(Saturate, UniformDensityMatchesGreedyOracle) {
  const std::size_t M = 10;
  VoxelGrid g(3, M);
  g.selected.assign(g.voxel_count(), 1);
  const RadialDensity rho = constant_density(3.0 / M);
  const auto r = saturate(g, PointSet(3), rho);

  PointSet centers(3);
  for (std::size_t m = 0; m < g.voxel_count(); ++m) centers.push_back(g.center(m));
  const std::vector<double> rv(centers.size(), 3.0 / M);
  const auto want = oracle::greedy_saturation(centers, rv, PointSet(3));
  ASSERT_EQ(r.voxels.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(r.voxels[i], want[i]);
  for (std::size_t i = 0; i < r.added.size(); ++i)
    for (std::size_t j = i + 1; j < r.added.size(); ++j) EXPECT_GT(oracle::dist(r.added[i], r.added[j]), 0.3);
  EXPECT_LE(r.density_evaluations, 11u * 11u * 11u);
}

TEST(Saturate, VariableDensityWithExistingNodesMatchesOracle) {
  const std::size_t M = 9;
  VoxelGrid g(3, M);
  g.selected.assign(g.voxel_count(), 1);
  PointSet existing = oracle::random_points(25, 3, 17, 0.0, 0.45);
  for (std::size_t m = 0; m < g.voxel_count(); ++m) {
    const Vec c = g.corner(m);
    if (c[0] < 0.45 && c[1] < 0.45 && c[2] < 0.45) g.node_count[m] = 1;
  }
  RadialDensity rho;
  rho.eval = [](ConstPoint x) { return 0.08 + 0.25 * x[0] + 0.1 * x[1] * x[2]; };
  const auto r = saturate(g, existing, rho);

  PointSet centers(3);
  std::vector<std::size_t> ids;
  std::vector<double> rv;
  for (std::size_t m = 0; m < g.voxel_count(); ++m) {
    if (g.node_count[m] != 0) continue;
    const Vec z = g.center(m);
    centers.push_back(z);
    ids.push_back(m);
    rv.push_back(rho(z));
  }
  const auto want = oracle::greedy_saturation(centers, rv, existing);
  ASSERT_EQ(r.voxels.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(r.voxels[i], ids[want[i]]);
}

TEST(Saturate, IndependentOfExistingNodeOrder) {
  VoxelGrid g(3, 8);
  g.selected.assign(g.voxel_count(), 1);
  PointSet existing = oracle::random_points(40, 3, 5, 0.0, 0.5);
  PointSet reversed(3);
  for (std::size_t i = existing.size(); i-- > 0;) reversed.push_back(existing[i]);
  RadialDensity rho;
  rho.eval = [](ConstPoint x) { return 0.1 + 0.2 * x[2]; };
  const auto a = saturate(g, existing, rho);
  const auto b = saturate(g, reversed, rho);
  EXPECT_EQ(a.added, b.added);
}

TEST(Cleanup, Examples) {
  const PointSet pts = oracle::random_points(2000, 3, 21);
  EXPECT_EQ(cleanup(pts, cube_domain(Box::unit(3))), pts);
  EXPECT_EQ(cleanup(PointSet(3), cube_domain(Box::unit(3))).size(), 0u);
  const Domain ball = centered_ball(0.4);
  std::size_t want = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < 3; ++k) s += (pts[i][k] - 0.5) * (pts[i][k] - 0.5);
    want += s < 0.16;
  }
  const PointSet kept = cleanup(pts, ball);
  EXPECT_EQ(kept.size(), want);
  for (std::size_t i = 0; i < kept.size(); ++i) EXPECT_TRUE(ball.contains(kept[i]));
}

TEST(PlanLayout, DensityEvaluatedAtCornersOnly) {
  LayoutConfig cfg;
  cfg.M = 12;
  std::size_t calls = 0;
  RadialDensity rho;
  rho.eval = [&](ConstPoint x) {
    ++calls;
    return 0.03 + 0.1 * x[0];
  };
  const LayoutPlan plan = plan_layout(centered_ball(0.45), rho, cfg, golden_source());
  EXPECT_LE(plan.corner_density_evaluations, 13u * 13u * 13u);
  EXPECT_LE(calls, 13u * 13u * 13u);
  for (std::size_t m = 0; m < plan.grid.voxel_count(); ++m) {
    if (!plan.grid.selected[m]) continue;
    double mean = 0.0;
    const Vec c = plan.grid.corner(m);
    for (int v = 0; v < 8; ++v) mean += 0.03 + 0.1 * (c[0] + (v & 1) / 12.0);
    EXPECT_NEAR(plan.grid.rho_bar[m], mean / 8.0, 1e-14);
  }
}

TEST(BuildLayout, NodesInsideDomainAndDeterministic) {
  LayoutConfig cfg;
  cfg.M = 8;
  cfg.seed = 4;
  const RadialDensity rho = constant_density(0.03);
  const Domain ball = centered_ball(0.45);
  const auto a = build_layout(ball, rho, cfg, golden_source());
  const auto b = build_layout(ball, rho, cfg, golden_source());
  EXPECT_EQ(a.nodes, b.nodes);
  EXPECT_GT(a.nodes.size(), 0u);
  EXPECT_EQ(a.filled + a.saturated - a.removed, a.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) EXPECT_TRUE(ball.contains(a.nodes[i]));
}
