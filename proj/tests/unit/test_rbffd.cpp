#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "nodegen/error.hpp"
#include "nodegen/qmc.hpp"
#include "nodegen/rbffd.hpp"
#include "oracles.hpp"

using namespace nodegen;

namespace {

double exact_operator_value(const DiffOperator& op, const std::vector<int>& a, ConstPoint x) {
  switch (op.kind) {
    case OperatorKind::Identity:
      return oracle::monomial(a, x);
    case OperatorKind::FirstPartial:
      return oracle::monomial_derivative(a, x, static_cast<int>(op.i), -1);
    case OperatorKind::SecondPartial:
      return oracle::monomial_derivative(a, x, static_cast<int>(op.i), static_cast<int>(op.j));
  }
  return 0.0;
}

}  // namespace

TEST(Kernel, ValuesAndDerivativeCombinations) {
  const Kernel g = Kernel::gaussian(2.0);
  EXPECT_DOUBLE_EQ(g.phi(0.0), 1.0);
  EXPECT_NEAR(g.phi(0.5), std::exp(-1.0), 1e-15);
  const Kernel r5 = Kernel::phs_odd(3);
  EXPECT_DOUBLE_EQ(r5.phi(2.0), 32.0);
  EXPECT_EQ(r5.phi(0.0), 0.0);
  EXPECT_EQ(r5.minimum_degree(), 2);
  const Kernel tps = Kernel::phs_even_log(1);
  EXPECT_EQ(tps.phi(0.0), 0.0);
  EXPECT_NEAR(tps.phi(2.0), 4.0 * std::log(2.0), 1e-15);
  EXPECT_EQ(tps.minimum_degree(), 1);
  EXPECT_EQ(Kernel::gaussian(1.0).minimum_degree(), -1);
  EXPECT_THROW(Kernel::gaussian(0.0).validate(), ConfigError);
  EXPECT_THROW(Kernel::phs_odd(0).validate(), ConfigError);

  // F1 = phi'/r, F2 = (phi'' - phi'/r) / r^2 against finite differences in r.
  for (const Kernel& k : {g, r5, tps}) {
    for (double r : {0.3, 0.7, 1.4}) {
      const double h = 1e-5;
      const double d1 = (k.phi(r + h) - k.phi(r - h)) / (2 * h);
      const double d2 = (k.phi(r + h) - 2 * k.phi(r) + k.phi(r - h)) / (h * h);
      EXPECT_NEAR(k.f1(r), d1 / r, 1e-6 * std::max(1.0, std::abs(d1 / r)));
      EXPECT_NEAR(k.f2(r), (d2 - d1 / r) / (r * r), 1e-4 * std::max(1.0, std::abs(d2 / (r * r))));
    }
  }
}

TEST(Operators, CountsAndMonomials) {
  EXPECT_EQ(first_and_second_partials(3).size(), 9u);
  EXPECT_EQ(monomial_count(3, 2), 10u);
  EXPECT_EQ(monomial_exponents(3, 2).size(), 10u);
  EXPECT_EQ(monomial_count(2, 3), 10u);
  const auto e = monomial_exponents(3, 2);
  EXPECT_EQ(e.front(), (std::vector<int>{0, 0, 0}));
  for (std::size_t q = 1; q < e.size(); ++q) {
    const int a = e[q - 1][0] + e[q - 1][1] + e[q - 1][2];
    const int b = e[q][0] + e[q][1] + e[q][2];
    EXPECT_LE(a, b);
  }
  const PointSet x = oracle::random_points(10, 3, 4, -1.0, 1.0);
  for (const auto& op : first_and_second_partials(3))
    for (const auto& a : monomial_exponents(3, 3))
      for (std::size_t i = 0; i < x.size(); ++i)
        EXPECT_NEAR(apply_to_monomial(op, a, x[i]), exact_operator_value(op, a, x[i]), 1e-13);
}

TEST(AssembleA, Examples) {
  PointSet two(3, std::vector<double>{0, 0, 0, 0.3, 0.4, 0});
  const Eigen::MatrixXd A = assemble_A(two, Kernel::gaussian(1.0));
  EXPECT_DOUBLE_EQ(A(0, 0), 1.0);
  EXPECT_NEAR(A(0, 1), std::exp(-0.25), 1e-15);
  EXPECT_EQ(A(0, 1), A(1, 0));
  PointSet one(3, std::vector<double>{0.1, 0.2, 0.3});
  EXPECT_EQ(assemble_A(one, Kernel::gaussian(1.0))(0, 0), 1.0);
  EXPECT_EQ(assemble_A(one, Kernel::phs_odd(3))(0, 0), 0.0);
  PointSet dup(3, std::vector<double>{0.1, 0.2, 0.3, 0.1, 0.2, 0.3});
  EXPECT_THROW(assemble_A(dup, Kernel::phs_odd(3)), DegeneratePairError);
}

TEST(AssembleA, GaussianIsSymmetricPositiveDefinite) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const PointSet p = oracle::random_points(20, 3, seed);
    const Eigen::MatrixXd A = assemble_A(p, Kernel::gaussian(3.0));
    EXPECT_EQ((A - A.transpose()).cwiseAbs().maxCoeff(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(AssembleA, GaussianConditionFallsAsShapeGrows) {
  const PointSet p = oracle::random_points(8, 3, 77);
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 49; ++i) {
    const double eps = 0.1 + i * 0.1;
    const double c = symmetric_condition_number(assemble_A(p, Kernel::gaussian(eps)));
    EXPECT_LE(c, prev * (1.0 + 1e-9)) << eps;
    prev = c;
  }
}

TEST(PhsSystem, LayoutForDegreeTwo) {
  const PointSet p = oracle::random_points(30, 3, 3);
  const double x0[3] = {0.5, 0.5, 0.5};
  const auto sys = assemble_phs_system(p, ConstPoint(x0, 3), 2, first_and_second_partials(3));
  EXPECT_EQ(sys.Q, 10u);
  EXPECT_EQ(sys.matrix.rows(), 40);
  EXPECT_EQ(sys.rhs.cols(), 9);
  EXPECT_EQ((sys.matrix - sys.matrix.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(sys.matrix.bottomRightCorner(10, 10).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(assemble_phs_system(p, ConstPoint(x0, 3), 1, first_and_second_partials(3)), ConfigError);
}

TEST(PhsSystem, ReproducesPolynomialsAtANode) {
  const PointSet p = oracle::random_points(35, 3, 9);
  const auto sys = assemble_phs_system(p, p[4], 2, {DiffOperator::identity()});
  const Eigen::MatrixXd w = solve_weights(sys);
  for (const auto& a : monomial_exponents(3, 2)) {
    double sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) sum += w(k, 0) * oracle::monomial(a, p[k]);
    EXPECT_NEAR(sum, oracle::monomial(a, p[4]), 1e-9);
  }
}

TEST(PhsSystem, DerivativeWeightsExactOnAllOperators) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t K = 20 + 4 * seed;
    const PointSet p = oracle::random_points(K, 3, seed, 0.3, 0.7);
    const double x0[3] = {0.5, 0.48, 0.51};
    const auto ops = first_and_second_partials(3);
    const auto sys = assemble_phs_system(p, ConstPoint(x0, 3), 2, ops);
    const Eigen::MatrixXd w = solve_weights(sys);
    for (std::size_t c = 0; c < ops.size(); ++c)
      for (const auto& a : monomial_exponents(3, 2)) {
        double sum = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          sum += w(k, c) * oracle::monomial(a, p[k]);
          scale += std::abs(w(k, c) * oracle::monomial(a, p[k]));
        }
        const double want = exact_operator_value(ops[c], a, ConstPoint(x0, 3));
        EXPECT_NEAR(sum, want, 1e-8 * std::max(1.0, scale));
      }
  }
}

TEST(PhsSystem, NonUnisolventStencilThrows) {
  PointSet flat(3);
  const PointSet raw = oracle::random_points(30, 3, 2);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double q[3] = {raw[i][0], raw[i][1], 0.0};
    flat.push_back(ConstPoint(q, 3));
  }
  const double x0[3] = {0.5, 0.5, 0.0};
  EXPECT_THROW(assemble_phs_system(flat, ConstPoint(x0, 3), 2, first_and_second_partials(3)), UnisolvencyError);
}

TEST(SolveWeights, GaussianSinglePoint) {
  PointSet one(3, std::vector<double>{0.2, 0.1, 0.4});
  const double x0[3] = {0.5, 0.3, 0.1};
  const Kernel g = Kernel::gaussian(1.5);
  const std::vector<DiffOperator> ops = {DiffOperator::identity(), DiffOperator::partial(0),
                                         DiffOperator::second(1, 2)};
  const auto sys = assemble_phs_system(one, ConstPoint(x0, 3), -1, ops, g);
  EXPECT_EQ(sys.Q, 0u);
  const Eigen::MatrixXd w = solve_weights(sys);
  for (std::size_t c = 0; c < ops.size(); ++c)
    EXPECT_NEAR(w(0, c), apply_to_kernel(ops[c], g, ConstPoint(x0, 3), one[0]) / g.phi(0.0), 1e-15);
}

TEST(SolveWeights, FirstPartialWeightsAntisymmetricUnderReflection) {
  const PointSet half = oracle::random_points(16, 3, 23, -0.2, 0.2);
  PointSet p(3);
  for (std::size_t i = 0; i < half.size(); ++i) {
    const double a[3] = {std::abs(half[i][0]) + 0.01, half[i][1], half[i][2]};
    const double b[3] = {-a[0], a[1], a[2]};
    p.push_back(ConstPoint(a, 3));
    p.push_back(ConstPoint(b, 3));
  }
  const double x0[3] = {0, 0, 0};
  const auto sys = assemble_phs_system(p, ConstPoint(x0, 3), 2, {DiffOperator::partial(0)});
  const Eigen::MatrixXd w = solve_weights(sys);
  for (std::size_t i = 0; i < half.size(); ++i) EXPECT_NEAR(w(2 * i, 0), -w(2 * i + 1, 0), 1e-8);
}

TEST(SolveWeights, IllConditionedSystemThrows) {
  const PointSet p = oracle::random_points(30, 3, 3);
  const double x0[3] = {0.5, 0.5, 0.5};
  const auto sys = assemble_phs_system(p, ConstPoint(x0, 3), 2, {DiffOperator::identity()});
  EXPECT_THROW(solve_weights(sys, 10.0), SolverError);
}

TEST(Conditioning, CartesianGridAndCenters) {
  const PointSet g = cartesian_grid(10, 3);
  EXPECT_EQ(g.size(), 1000u);
  EXPECT_DOUBLE_EQ(g[0][0], 0.05);
  ConditioningConfig cfg;
  const PointSet c = stencil_centers(500, 3, cfg);
  for (double v : c.coords()) {
    EXPECT_GE(v, 0.2);
    EXPECT_LE(v, 0.8);
  }
}

TEST(Conditioning, ExperimentIsDeterministicWithRowsPerFamily) {
  ConditioningConfig cfg;
  cfg.K_values = {20, 30};
  cfg.trials = 6;
  const std::vector<std::pair<std::string, PointSet>> pops = {{"halton", halton(1000, 3)},
                                                              {"cartesian", cartesian_grid(10, 3)}};
  const auto a = conditioning_experiment(pops, cfg);
  const auto b = conditioning_experiment(pops, cfg);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].avg_cond, b[i].avg_cond);
    EXPECT_GT(a[i].avg_cond, 1.0);
    EXPECT_NEAR(a[i].log10_avg_cond, std::log10(a[i].avg_cond), 1e-12);
  }
}
