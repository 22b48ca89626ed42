#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nodegen/point_set.hpp"

namespace nodegen {

enum class KernelKind { Gaussian, PhsOdd, PhsEvenLog };

/// Radial kernel phi(r) with the two radial derivative combinations needed
/// for first and second partials:
///   d/dx_i phi = F1(r) dx_i,  d2/dx_i dx_j phi = F2(r) dx_i dx_j + F1(r) delta_ij,
/// where F1 = phi'/r and F2 = (phi'' - phi'/r) / r^2.
struct Kernel {
  KernelKind kind = KernelKind::PhsOdd;
  double epsilon = 1.0;  // Gaussian shape parameter
  int p = 3;             // PHS order: r^(2p-1) or r^(2p) log r

  static Kernel gaussian(double epsilon);
  static Kernel phs_odd(int p);
  static Kernel phs_even_log(int p);

  void validate() const;
  double phi(double r) const;
  double f1(double r) const;
  double f2(double r) const;
  /// Smallest polynomial degree for the augmented system: p - 1 (odd), p (even log), -1 (Gaussian).
  int minimum_degree() const;
  std::string name() const;
};

enum class OperatorKind { Identity, FirstPartial, SecondPartial };

struct DiffOperator {
  OperatorKind kind = OperatorKind::Identity;
  std::size_t i = 0;
  std::size_t j = 0;

  static DiffOperator identity() { return {}; }
  static DiffOperator partial(std::size_t i) { return {OperatorKind::FirstPartial, i, i}; }
  static DiffOperator second(std::size_t i, std::size_t j) {
    return {OperatorKind::SecondPartial, std::min(i, j), std::max(i, j)};
  }
  std::string name() const;
};

/// All d first partials followed by all second partials with i <= j.
std::vector<DiffOperator> first_and_second_partials(std::size_t d);

/// Exponent vectors of all monomials of total degree <= degree, graded-lexicographic.
std::vector<std::vector<int>> monomial_exponents(std::size_t d, int degree);
std::size_t monomial_count(std::size_t d, int degree);

/// Operator applied to the monomial with exponents `a`, evaluated at x.
double apply_to_monomial(const DiffOperator& op, const std::vector<int>& a, ConstPoint x);
/// Operator applied to x -> phi(|x - center|), evaluated at x.
double apply_to_kernel(const DiffOperator& op, const Kernel& kernel, ConstPoint x, ConstPoint center);

/// K x K matrix phi(|x_i - x_j|); duplicates throw DegeneratePairError.
Eigen::MatrixXd assemble_A(const PointSet& points, const Kernel& kernel);

struct StencilSystem {
  Kernel kernel;
  int degree = -1;
  PointSet points;
  Vec x0;
  std::vector<DiffOperator> operators;
  std::size_t K = 0;
  std::size_t Q = 0;
  /// [[A, P], [P^T, 0]] with P_kq = pi_q(x_k).
  Eigen::MatrixXd matrix;
  /// One column per operator: L phi(|x0 - x_k|) then L pi_q(x0).
  Eigen::MatrixXd rhs;
};

/// Augmented system for the given kernel and polynomial degree. The degree
/// must be at least kernel.minimum_degree(); a rank-deficient polynomial
/// block throws UnisolvencyError.
StencilSystem assemble_phs_system(const PointSet& points, ConstPoint x0, int degree,
                                  const std::vector<DiffOperator>& operators,
                                  const Kernel& kernel = Kernel::phs_odd(3));

/// 2-norm condition number of a symmetric matrix (largest over smallest |eigenvalue|).
double symmetric_condition_number(const Eigen::MatrixXd& matrix);

/// Full solution (K + Q rows, one column per operator); rows 0..K-1 are the
/// finite-difference weights. Throws SolverError above condition 1e16.
Eigen::MatrixXd solve_weights(const StencilSystem& system, double condition_limit = 1e16);

struct ConditioningConfig {
  std::vector<std::size_t> K_values;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  double center_sigma = 0.1;
  double clip_lo = 0.2;
  double clip_hi = 0.8;
  int degree = 2;
  Kernel kernel = Kernel::phs_odd(3);
};

struct ConditioningRow {
  std::string family;
  std::size_t K = 0;
  std::size_t trials = 0;
  std::size_t excluded = 0;
  double avg_cond = 0.0;
  double log10_avg_cond = 0.0;
};

/// Stencil centers drawn from N(0.5, sigma^2) per coordinate, clipped to [clip_lo, clip_hi].
PointSet stencil_centers(std::size_t count, std::size_t d, const ConditioningConfig& config);

/// Average condition number of the joint system (all first and second
/// partials) on K-nearest stencils around shared random centers.
std::vector<ConditioningRow> conditioning_experiment(
    const std::vector<std::pair<std::string, PointSet>>& populations, const ConditioningConfig& config);

/// (i + 0.5) / per_side in each coordinate.
PointSet cartesian_grid(std::size_t per_side, std::size_t d);

void write_conditioning_csv(const std::vector<ConditioningRow>& rows, const std::string& path);

}  // namespace nodegen
