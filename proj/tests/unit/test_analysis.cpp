#include <gtest/gtest.h>

#include <cmath>

#include "nodegen/analysis.hpp"
#include "nodegen/error.hpp"
#include "nodegen/rbffd.hpp"
#include "oracles.hpp"

using namespace nodegen;

TEST(Percentile, LinearInterpolationBetweenOrderStatistics) {
  const std::vector<double> v = {4, 1, 3, 2, 5};
  EXPECT_DOUBLE_EQ(percentile(v, 0), 1.0);
  EXPECT_DOUBLE_EQ(percentile(v, 50), 3.0);
  EXPECT_DOUBLE_EQ(percentile(v, 100), 5.0);
  EXPECT_DOUBLE_EQ(percentile(v, 10), 1.4);
  EXPECT_DOUBLE_EQ(percentile({7.0}, 95), 7.0);
}

TEST(Summarize, MomentsAndLevels) {
  const std::vector<double> v = {1, 2, 3, 4};
  const Summary s = summarize(v);
  EXPECT_EQ(s.count, 4u);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.variance, 1.25);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.max, 4.0);
  EXPECT_DOUBLE_EQ(s.at_percentile(50), 2.5);
}

TEST(NnDistances, TwoPoints) {
  PointSet p(3, std::vector<double>{0, 0, 0, 1, 0, 0});
  const NnStats nn = nn_distances(p, 1);
  EXPECT_EQ(nn.at(0, 1), 1.0);
  EXPECT_EQ(nn.at(1, 1), 1.0);
  EXPECT_THROW(nn_distances(p, 2), ConfigError);
}

TEST(NnDistances, GridInteriorNodeHasSixUnitNeighbors) {
  PointSet p = cartesian_grid(5, 3);
  for (double& v : p.coords()) v *= 5.0;  // unit spacing
  const NnStats nn = nn_distances(p, 6);
  const std::size_t center = 2 + 5 * 2 + 25 * 2;
  for (std::size_t j = 1; j <= 6; ++j) EXPECT_NEAR(nn.at(center, j), 1.0, 1e-14);
}

TEST(NnDistances, MatchesBruteForce) {
  const PointSet p = oracle::random_points(500, 3, 14);
  const NnStats nn = nn_distances(p, 12);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto want = oracle::sorted_neighbors(p, p[i], static_cast<long>(i));
    for (std::size_t j = 1; j <= 12; ++j) EXPECT_EQ(nn.at(i, j), want[j - 1].first);
  }
  double r41 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) r41 += nn.at(i, 4) / nn.at(i, 1);
  EXPECT_NEAR(nn.mean_ratio_4_1, r41 / p.size(), 1e-12);
  EXPECT_NEAR(nn.per_order[0].mean, separation_summary(p).mean_nn, 1e-14);
}

TEST(NnDistances, NearestDistanceIsLipschitzOne) {
  const PointSet p = oracle::random_points(300, 3, 15);
  const auto d1 = nn_distances(p, 1).order(1);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      EXPECT_LE(std::abs(d1[i] - d1[j]), oracle::dist(p[i], p[j]) + 1e-15);
}

TEST(RatioStats, PerfectGridGivesOnes) {
  PointSet p = cartesian_grid(6, 3);
  const RadialDensity rho = constant_density(1.0 / 6.0);
  const RatioStats r = ratio_stats(p, rho);
  for (double v : r.values) EXPECT_NEAR(v, 1.0, 1e-12);
  EXPECT_NEAR(r.summary.variance, 0.0, 1e-20);
}

TEST(RatioStats, OutliersSitOutsideTheCentralBand) {
  const PointSet p = oracle::random_points(400, 3, 16);
  RadialDensity rho;
  rho.eval = [](ConstPoint x) { return 0.05 + 0.05 * x[0]; };
  const RatioStats r = ratio_stats(p, rho);
  EXPECT_EQ(r.values.size(), 400u);
  for (std::size_t i : r.outliers) EXPECT_TRUE(r.values[i] < r.p5 || r.values[i] > r.p95);
  std::size_t outside = 0;
  for (double v : r.values) outside += (v < r.p5 || v > r.p95);
  EXPECT_EQ(outside, r.outliers.size());
}

TEST(SeparationSummary, TwoPoints) {
  PointSet p(3, std::vector<double>{0, 0, 0, 0.3, 0, 0});
  const auto s = separation_summary(p);
  EXPECT_NEAR(s.min_sep, 0.3, 1e-16);
  EXPECT_NEAR(s.mean_nn, 0.3, 1e-16);
}

TEST(HoleRadius, CubeCornersGiveTheCenter) {
  PointSet p(3);
  for (int v = 0; v < 8; ++v) {
    const double x[3] = {double(v & 1), double((v >> 1) & 1), double((v >> 2) & 1)};
    p.push_back(ConstPoint(x, 3));
  }
  const auto h = hole_radius_estimate(p, cube_domain(Box::unit(3)), 200, 200, 1);
  EXPECT_NEAR(h.max_radius, std::sqrt(3.0) / 2.0, 0.02 * std::sqrt(3.0) / 2.0);
}

TEST(HoleRadius, WithinFivePercentOfExactOracle) {
  for (std::uint64_t seed : {3u, 4u}) {
    const PointSet p = oracle::random_points(60, 3, seed);
    const double exact = oracle::exact_max_hole_cube(p, 0.0, 1.0);
    const auto h = hole_radius_estimate(p, cube_domain(Box::unit(3)), 4000, 200, seed);
    EXPECT_LE(h.max_radius, exact * (1.0 + 1e-9));
    EXPECT_GE(h.max_radius, 0.95 * exact);
  }
}

TEST(HoleRadius, MedianAtLeastHalfMedianSpacing) {
  PointSet p = cartesian_grid(8, 3);
  const PointSet jitter = oracle::random_points(p.size(), 3, 8, -0.01, 0.01);
  for (std::size_t i = 0; i < p.coords().size(); ++i) p.coords()[i] += jitter.coords()[i];
  const auto h = hole_radius_estimate(p, cube_domain(Box::unit(3)), 1000, 200, 5);
  const auto d1 = nn_distances(p, 1).order(1);
  EXPECT_GE(percentile(h.radii, 50), 0.5 * percentile(d1, 50));
}

TEST(LogLogSlope, PowerLaw) {
  std::vector<double> x, y;
  for (int n = 1; n <= 20; ++n) {
    x.push_back(n);
    y.push_back(3.0 * std::pow(n, -1.0 / 3.0));
  }
  EXPECT_NEAR(log_log_slope(x, y), -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(log_log_slope(x, y), oracle::loglog_slope(x, y), 1e-12);
}
