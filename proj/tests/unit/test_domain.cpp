#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "nodegen/domain.hpp"
#include "nodegen/elevation.hpp"
#include "nodegen/error.hpp"
#include "nodegen/expression.hpp"
#include "oracles.hpp"

using namespace nodegen;

namespace {

FixedPointCloud two_point_cloud() {
  FixedPointCloud c;
  c.points = PointSet(3, std::vector<double>{0, 0, 0, 1, 0, 0});
  return c;
}

}  // namespace

TEST(PointCloudDensity, Examples) {
  const auto cloud = two_point_cloud();
  const double at_point[3] = {0, 0, 0}, mid[3] = {0.5, 0, 0};
  EXPECT_DOUBLE_EQ(point_cloud_density(cloud, ConstPoint(at_point, 3)), 0.05);
  EXPECT_DOUBLE_EQ(point_cloud_density(cloud, ConstPoint(mid, 3)), 0.05);
  FixedPointCloud lonely;
  lonely.points = PointSet(3, std::vector<double>{0, 0, 0});
  EXPECT_THROW(make_point_cloud_density(lonely), ConfigError);
}

TEST(PointCloudDensity, MatchesTwoNearestOracleAndLipschitzBound) {
  const Box box = Box::cube(3, -1.0, 1.0);
  const auto cloud = random_point_cloud(100, box, 1, 20.0);
  const auto rho = make_point_cloud_density(cloud);
  const PointSet q = oracle::random_points(500, 3, 2, -1.0, 1.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto nb = oracle::sorted_neighbors(cloud.points, q[i]);
    EXPECT_NEAR(rho(q[i]), (nb[0].first + nb[1].first) / 20.0, 1e-15);
  }
  EXPECT_LE(sampled_lipschitz_ratio(rho, box, 10000, 3), 0.1 + 1e-12);
  EXPECT_DOUBLE_EQ(rho.lipschitz_bound, 0.1);
}

TEST(ShellTransform, ExamplesAndDerivative) {
  const double R = 6371220.0, h = 400.0, C = std::numbers::pi / 90.0;
  EXPECT_DOUBLE_EQ(shell_transform(R, R, h, C), 1.0);
  EXPECT_NEAR(shell_transform(R + 12000.0, R, h, C), std::exp(30.0 * C), 1e-12);
  const double r = R + 5000.0, dr = 1e-3 * h;
  const double fd = (shell_transform(r + dr, R, h, C) - shell_transform(r - dr, R, h, C)) / (2 * dr);
  EXPECT_NEAR(fd / ((C / h) * shell_transform(r, R, h, C)), 1.0, 1e-6);
  EXPECT_NEAR(shell_inverse_transform(shell_transform(r, R, h, C), R, h, C), r, 1e-6);
  EXPECT_THROW(shell_transform(R, R, 0.0, C), ConfigError);
}

TEST(ShellTransform, EquispacedShellBecomesIsotropic) {
  // Layers at vertical gap h with tangential gap C r: after the transform
  // both gaps scale with r_hat and their ratio approaches one.
  const double R = 1000.0, h = 1.0, C = 0.01;
  for (int layer = 1; layer < 30; ++layer) {
    const double r = R + layer * h;
    const double vertical = shell_transform(r + h, R, h, C) - shell_transform(r, R, h, C);
    const double tangential = C * shell_transform(r, R, h, C);
    EXPECT_NEAR(vertical / tangential, 1.0, 0.01);
  }
}

TEST(ShellDensity, Examples) {
  const double x[3] = {1, 0, 0}, x2[3] = {2, 0, 0}, o[3] = {0, 0, 0};
  EXPECT_DOUBLE_EQ(shell_density(ConstPoint(x, 3), 0.03), 0.03);
  EXPECT_DOUBLE_EQ(shell_density(ConstPoint(x2, 3), 0.03), 2 * shell_density(ConstPoint(x, 3), 0.03));
  EXPECT_THROW(shell_density(ConstPoint(o, 3), 0.03), DomainError);
  const auto rho = make_shell_density(0.03, ConstPoint(o, 3));
  EXPECT_LE(sampled_lipschitz_ratio(rho, Box::cube(3, 0.5, 3.0), 10000, 4), 0.03 + 1e-12);
  double g[3];
  const double y[3] = {0.3, -1.2, 0.7};
  rho.gradient_at(ConstPoint(y, 3), MutPoint(g, 3));
  const double n = std::sqrt(0.09 + 1.44 + 0.49);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(g[k], 0.03 * y[k] / n, 1e-15);
}

TEST(RadialDensity, FiniteDifferenceGradientFallback) {
  auto rho = make_expression_density("0.01 + 0.1 * x * y + 0.05 * z", 1.0);
  ASSERT_FALSE(rho.has_analytic_gradient());
  const double x[3] = {0.3, 0.6, 0.2};
  double g[3];
  rho.gradient_at(ConstPoint(x, 3), MutPoint(g, 3));
  EXPECT_NEAR(g[0], 0.06, 1e-9);
  EXPECT_NEAR(g[1], 0.03, 1e-9);
  EXPECT_NEAR(g[2], 0.05, 1e-9);
}

TEST(RadialDensity, ShippedDensitiesPassSampledLipschitzTest) {
  const Box box = Box::cube(3, -1.0, 1.0);
  const auto constant = constant_density(0.02);
  EXPECT_EQ(sampled_lipschitz_ratio(constant, box, 10000, 1), 0.0);
  const auto scaled = scaled_density(make_point_cloud_density(random_point_cloud(100, box, 7)), 2.0);
  EXPECT_LE(sampled_lipschitz_ratio(scaled, box, 10000, 2), scaled.lipschitz_bound + 1e-12);
}

TEST(Expression, ParsesAndEvaluates) {
  const double x[3] = {1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(Expression("x + 2*y - z^2")(ConstPoint(x, 3)), 1 + 4 - 9);
  EXPECT_DOUBLE_EQ(Expression("-2^2")(ConstPoint(x, 3)), -4.0);
  EXPECT_NEAR(Expression("sqrt(x1*x1 + x2*x2 + x3*x3)")(ConstPoint(x, 3)), std::sqrt(14.0), 1e-15);
  EXPECT_NEAR(Expression("max(sin(pi/2), 0.5) + min(1, 2) + pow(2, 3)")(ConstPoint(x, 3)), 10.0, 1e-15);
  EXPECT_THROW(Expression("x + "), ParseError);
  EXPECT_THROW(Expression("foo(x)"), ParseError);
  EXPECT_THROW(Expression("(x"), ParseError);
}

TEST(Elevation, ConstantGridInclusion) {
  const ElevationGrid grid(8, 4, 1.1, std::vector<double>(32, 1.0));
  EXPECT_TRUE(elevation_inclusion(grid, Spherical{1.05, 0.3, 1.0}));
  EXPECT_FALSE(elevation_inclusion(grid, Spherical{0.95, 0.3, 1.0}));
  EXPECT_FALSE(elevation_inclusion(grid, Spherical{1.1, 0.3, 1.0}));
  EXPECT_THROW(elevation_inclusion(grid, Spherical{0.0, 0.3, 1.0}), DomainError);
  EXPECT_THROW(elevation_inclusion(grid, Spherical{std::nan(""), 0.3, 1.0}), InputError);
}

TEST(Elevation, PointOnInterpolatedPlaneIsExcluded) {
  const std::size_t rows = 16, cols = 8;
  std::vector<double> radii(rows * cols);
  for (std::size_t l = 0; l < rows; ++l)
    for (std::size_t m = 0; m < cols; ++m) radii[l * cols + m] = 1.0 + 1e-3 * static_cast<double>(l);
  const ElevationGrid grid(rows, cols, 1.1, radii);
  const double B = grid.angular_step();
  // Inside cell (l = 3, m = 2): r1 = r3 = 1.003, r2 = 1.004.
  const double a = 3.4 * B, p = 2.7 * B;
  const double plane = 1.003 + ((a - 3 * B) / B) * 1e-3;
  EXPECT_FALSE(elevation_inclusion(grid, Spherical{grid.surface_radius(a, p), a, p}));
  EXPECT_NEAR(grid.surface_radius(a, p), plane, 1e-15);
  EXPECT_TRUE(elevation_inclusion(grid, Spherical{plane + 1e-9, a, p}));
}

TEST(Elevation, AzimuthWrapIsContinuous) {
  const auto grid = synthetic_elevation(72, 36, 0.02, 3, 1.1);
  double max_cell = 0.0;
  for (std::size_t l = 0; l < grid.rows(); ++l)
    for (std::size_t m = 0; m < grid.cols(); ++m)
      max_cell = std::max(max_cell, std::abs(grid.radius((l + 1) % grid.rows(), m) - grid.radius(l, m)));
  for (double p : {0.4, 1.3, 2.2}) {
    const double before = grid.surface_radius(2 * std::numbers::pi - 1e-9, p);
    const double after = grid.surface_radius(1e-9, p);
    EXPECT_LE(std::abs(before - after), max_cell + 1e-6);
  }
}

TEST(Elevation, SyntheticGridProperties) {
  const auto flat = synthetic_elevation(40, 20, 0.0, 1, 1.1);
  for (double r : flat.radii()) EXPECT_EQ(r, 1.0);
  const auto a = synthetic_elevation(40, 20, 0.02, 5, 1.1);
  const auto b = synthetic_elevation(40, 20, 0.02, 5, 1.1);
  EXPECT_EQ(a.radii(), b.radii());
  double dev = 0.0;
  for (double r : a.radii()) dev = std::max(dev, std::abs(r - 1.0));
  EXPECT_LE(dev, 0.02 + 1e-15);
  EXPECT_GT(dev, 0.0);
  EXPECT_THROW(synthetic_elevation(40, 20, 0.2, 1, 1.1), ConfigError);
  EXPECT_THROW(synthetic_elevation(3, 20, 0.01, 1, 1.1), ConfigError);
}

TEST(Elevation, BinaryRoundTrip) {
  const auto grid = synthetic_elevation(24, 12, 0.01, 2, 1.05);
  const auto path = (std::filesystem::temp_directory_path() / "nodegen_test.elev").string();
  write_elevation(grid, path);
  const auto back = read_elevation(path);
  EXPECT_EQ(back.rows(), 24u);
  EXPECT_EQ(back.cols(), 12u);
  EXPECT_EQ(back.outer_radius(), 1.05);
  EXPECT_EQ(back.radii(), grid.radii());
}

TEST(Domain, ContainsIsFalseOutsideBoundingBox) {
  const double c[3] = {0.5, 0.5, 0.5};
  Domain d = ball_domain(ConstPoint(c, 3), 10.0);
  d.bounding_box = Box::unit(3);
  const double out[3] = {1.5, 0.5, 0.5};
  EXPECT_TRUE(d.inside(ConstPoint(out, 3)));
  EXPECT_FALSE(d.contains(ConstPoint(out, 3)));
}

TEST(Domain, BallPullbackLandsInside) {
  const double c[3] = {0.5, 0.5, 0.5};
  const Domain d = ball_domain(ConstPoint(c, 3), 0.4, true);
  ASSERT_TRUE(d.has_pullback());
  const PointSet q = oracle::random_points(200, 3, 8, 0.0, 1.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    double y[3];
    d.pullback(q[i], MutPoint(y, 3));
    EXPECT_TRUE(d.contains(ConstPoint(y, 3)));
  }
}

TEST(UnitFrame, RoundTripAndDensityScaling) {
  const Box box{{-1.0, -2.0, 0.0}, {1.0, 2.0, 1.0}};
  const UnitFrame frame(box);
  EXPECT_DOUBLE_EQ(frame.side(), 4.0);
  const PointSet p = oracle::random_points(50, 3, 6, -1.0, 1.0);
  const PointSet back = frame.from_unit(frame.to_unit(p));
  for (std::size_t i = 0; i < p.coords().size(); ++i) EXPECT_NEAR(back.coords()[i], p.coords()[i], 1e-15);
  const auto rho = make_expression_density("0.1 + 0.01 * x", 0.01);
  const auto unit = frame.to_unit(rho);
  const PointSet u = frame.to_unit(p);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(unit(u[i]) * 4.0, rho(p[i]), 1e-15);
}

TEST(SphereNodes, QuasiUniformOnSphere) {
  const double c[3] = {0, 0, 0};
  const PointSet s = sphere_nodes(500, ConstPoint(c, 3), 2.0);
  ASSERT_EQ(s.size(), 500u);
  double mn = 1e9, mx = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(std::sqrt(s[i][0] * s[i][0] + s[i][1] * s[i][1] + s[i][2] * s[i][2]), 2.0, 1e-12);
    const auto nb = oracle::sorted_neighbors(s, s[i], static_cast<long>(i));
    mn = std::min(mn, nb[0].first);
    mx = std::max(mx, nb[0].first);
  }
  EXPECT_GT(mn / mx, 0.7);
}
