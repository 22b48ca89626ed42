#include "nodegen/rbffd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "nodegen/error.hpp"
#include "nodegen/parallel.hpp"
#include "nodegen/rng.hpp"
#include "nodegen/spatial_index.hpp"

namespace nodegen {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

// r^e with the r = 0 limit taken as 0 for e > 0.
double rpow(double r, int e) {
  if (r == 0.0) return e == 0 ? 1.0 : 0.0;
  return std::pow(r, e);
}

// r^e log r with the r = 0 limit 0 for e > 0.
double rpow_log(double r, int e) {
  if (r == 0.0) return 0.0;
  return std::pow(r, e) * std::log(r);
}

void enumerate(std::size_t d, int remaining, std::size_t k, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
  if (k + 1 == d) {
    cur[k] = remaining;
    out.push_back(cur);
    return;
  }
  for (int a = remaining; a >= 0; --a) {
    cur[k] = a;
    enumerate(d, remaining - a, k + 1, cur, out);
  }
}

}  // namespace

Kernel Kernel::gaussian(double epsilon) {
  Kernel k{KernelKind::Gaussian, epsilon, 0};
  k.validate();
  return k;
}

Kernel Kernel::phs_odd(int p) {
  Kernel k{KernelKind::PhsOdd, 1.0, p};
  k.validate();
  return k;
}

Kernel Kernel::phs_even_log(int p) {
  Kernel k{KernelKind::PhsEvenLog, 1.0, p};
  k.validate();
  return k;
}

void Kernel::validate() const {
  if (kind == KernelKind::Gaussian && !(epsilon > 0.0)) throw ConfigError("Gaussian shape parameter must be positive");
  if (kind != KernelKind::Gaussian && p < 1) throw ConfigError("PHS order p must be at least 1");
}

double Kernel::phi(double r) const {
  switch (kind) {
    case KernelKind::Gaussian:
      return std::exp(-epsilon * epsilon * r * r);
    case KernelKind::PhsOdd:
      return rpow(r, 2 * p - 1);
    case KernelKind::PhsEvenLog:
      return rpow_log(r, 2 * p);
  }
  return 0.0;
}

double Kernel::f1(double r) const {
  switch (kind) {
    case KernelKind::Gaussian:
      return -2.0 * epsilon * epsilon * phi(r);
    case KernelKind::PhsOdd: {
      const int m = 2 * p - 1;
      return m * rpow(r, m - 2);
    }
    case KernelKind::PhsEvenLog: {
      const int m = 2 * p;
      return m * rpow_log(r, m - 2) + rpow(r, m - 2);
    }
  }
  return 0.0;
}

double Kernel::f2(double r) const {
  switch (kind) {
    case KernelKind::Gaussian: {
      const double e2 = epsilon * epsilon;
      return 4.0 * e2 * e2 * phi(r);
    }
    case KernelKind::PhsOdd: {
      const int m = 2 * p - 1;
      return static_cast<double>(m * (m - 2)) * rpow(r, m - 4);
    }
    case KernelKind::PhsEvenLog: {
      const int m = 2 * p;
      return static_cast<double>(m * (m - 2)) * rpow_log(r, m - 4) + 2.0 * (m - 1) * rpow(r, m - 4);
    }
  }
  return 0.0;
}

int Kernel::minimum_degree() const {
  switch (kind) {
    case KernelKind::Gaussian:
      return -1;
    case KernelKind::PhsOdd:
      return p - 1;
    case KernelKind::PhsEvenLog:
      return p;
  }
  return -1;
}

std::string Kernel::name() const {
  switch (kind) {
    case KernelKind::Gaussian:
      return "gaussian(" + std::to_string(epsilon) + ")";
    case KernelKind::PhsOdd:
      return "r^" + std::to_string(2 * p - 1);
    case KernelKind::PhsEvenLog:
      return "r^" + std::to_string(2 * p) + " log r";
  }
  return "";
}

std::string DiffOperator::name() const {
  switch (kind) {
    case OperatorKind::Identity:
      return "I";
    case OperatorKind::FirstPartial:
      return "d" + std::to_string(i + 1);
    case OperatorKind::SecondPartial:
      return "d" + std::to_string(i + 1) + std::to_string(j + 1);
  }
  return "";
}

std::vector<DiffOperator> first_and_second_partials(std::size_t d) {
  std::vector<DiffOperator> ops;
  for (std::size_t i = 0; i < d; ++i) ops.push_back(DiffOperator::partial(i));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) ops.push_back(DiffOperator::second(i, j));
  return ops;
}

std::vector<std::vector<int>> monomial_exponents(std::size_t d, int degree) {
  std::vector<std::vector<int>> out;
  if (d == 0) return out;
  std::vector<int> cur(d, 0);
  for (int g = 0; g <= degree; ++g) enumerate(d, g, 0, cur, out);
  return out;
}

std::size_t monomial_count(std::size_t d, int degree) {
  if (degree < 0) return 0;
  // C(degree + d, d)
  double c = 1.0;
  for (std::size_t k = 1; k <= d; ++k) c = c * static_cast<double>(degree + static_cast<int>(k)) / static_cast<double>(k);
  return static_cast<std::size_t>(std::llround(c));
}

double apply_to_monomial(const DiffOperator& op, const std::vector<int>& a, ConstPoint x) {
  std::vector<int> e(a);
  double coeff = 1.0;
  auto differentiate = [&](std::size_t k) {
    coeff *= e[k];
    e[k] = std::max(0, e[k] - 1);
  };
  if (op.kind == OperatorKind::FirstPartial) differentiate(op.i);
  if (op.kind == OperatorKind::SecondPartial) {
    differentiate(op.i);
    differentiate(op.j);
  }
  if (coeff == 0.0) return 0.0;
  double v = coeff;
  for (std::size_t k = 0; k < e.size(); ++k) v *= ipow(x[k], e[k]);
  return v;
}

double apply_to_kernel(const DiffOperator& op, const Kernel& kernel, ConstPoint x, ConstPoint center) {
  const double r = distance(x, center);
  switch (op.kind) {
    case OperatorKind::Identity:
      return kernel.phi(r);
    case OperatorKind::FirstPartial:
      return kernel.f1(r) * (x[op.i] - center[op.i]);
    case OperatorKind::SecondPartial: {
      double v = kernel.f2(r) * (x[op.i] - center[op.i]) * (x[op.j] - center[op.j]);
      if (op.i == op.j) v += kernel.f1(r);
      return v;
    }
  }
  return 0.0;
}

Eigen::MatrixXd assemble_A(const PointSet& points, const Kernel& kernel) {
  kernel.validate();
  const std::size_t K = points.size();
  Eigen::MatrixXd A(K, K);
  for (std::size_t i = 0; i < K; ++i) {
    A(i, i) = kernel.phi(0.0);
    for (std::size_t j = i + 1; j < K; ++j) {
      const double r = distance(points[i], points[j]);
      if (r == 0.0) throw DegeneratePairError(i, j);
      A(i, j) = A(j, i) = kernel.phi(r);
    }
  }
  return A;
}

StencilSystem assemble_phs_system(const PointSet& points, ConstPoint x0, int degree,
                                  const std::vector<DiffOperator>& operators, const Kernel& kernel) {
  kernel.validate();
  if (degree < kernel.minimum_degree())
    throw ConfigError("polynomial degree " + std::to_string(degree) + " is below the minimum " +
                      std::to_string(kernel.minimum_degree()) + " for kernel " + kernel.name());
  const std::size_t d = points.dim();
  if (x0.size() != d) throw ConfigError("evaluation point dimension differs from the stencil");
  for (const auto& op : operators)
    if (op.i >= d || op.j >= d) throw ConfigError("operator index exceeds the dimension");

  StencilSystem sys;
  sys.kernel = kernel;
  sys.degree = degree;
  sys.points = points;
  sys.x0.assign(x0.begin(), x0.end());
  sys.operators = operators;
  sys.K = points.size();
  const auto exps = monomial_exponents(d, degree);
  sys.Q = exps.size();
  const std::size_t K = sys.K, Q = sys.Q;

  Eigen::MatrixXd P(K, Q);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t q = 0; q < Q; ++q) P(k, q) = apply_to_monomial(DiffOperator::identity(), exps[q], points[k]);
  if (Q > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(P);
    if (K < Q || static_cast<std::size_t>(qr.rank()) < Q)
      throw UnisolvencyError("stencil of " + std::to_string(K) + " nodes is not unisolvent for degree " +
                             std::to_string(degree));
  }

  sys.matrix = Eigen::MatrixXd::Zero(K + Q, K + Q);
  sys.matrix.topLeftCorner(K, K) = assemble_A(points, kernel);
  sys.matrix.topRightCorner(K, Q) = P;
  sys.matrix.bottomLeftCorner(Q, K) = P.transpose();

  sys.rhs.resize(K + Q, operators.size());
  for (std::size_t c = 0; c < operators.size(); ++c) {
    for (std::size_t k = 0; k < K; ++k) sys.rhs(k, c) = apply_to_kernel(operators[c], kernel, x0, points[k]);
    for (std::size_t q = 0; q < Q; ++q) sys.rhs(K + q, c) = apply_to_monomial(operators[c], exps[q], x0);
  }
  return sys;
}

double symmetric_condition_number(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const Eigen::VectorXd ev = eig.eigenvalues().cwiseAbs();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Eigen::MatrixXd solve_weights(const StencilSystem& system, double condition_limit) {
  const double cond = symmetric_condition_number(system.matrix);
  if (!std::isfinite(cond) || cond > condition_limit)
    throw SolverError("stencil system is singular or too ill-conditioned", cond);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(system.matrix);
  return qr.solve(system.rhs);
}

PointSet stencil_centers(std::size_t count, std::size_t d, const ConditioningConfig& config) {
  Rng rng(mix_seed(config.seed, 0xce17e5));
  PointSet out(d);
  out.reserve(count);
  Vec x(d);
  for (std::size_t t = 0; t < count; ++t) {
    for (std::size_t k = 0; k < d; ++k)
      x[k] = std::clamp(0.5 + config.center_sigma * rng.normal(), config.clip_lo, config.clip_hi);
    out.push_back(x);
  }
  return out;
}

std::vector<ConditioningRow> conditioning_experiment(
    const std::vector<std::pair<std::string, PointSet>>& populations, const ConditioningConfig& config) {
  std::vector<ConditioningRow> rows;
  if (populations.empty()) return rows;
  const std::size_t d = populations.front().second.dim();
  const PointSet centers = stencil_centers(config.trials, d, config);
  const auto ops = first_and_second_partials(d);
  for (const auto& [family, population] : populations) {
    if (population.dim() != d) throw ConfigError("populations must share a dimension");
    const KdTree tree(population);
    for (std::size_t K : config.K_values) {
      if (K > population.size()) throw ConfigError("stencil size exceeds the population of " + family);
      std::vector<double> cond(config.trials, 0.0);
      std::vector<std::uint8_t> ok(config.trials, 0);
      parallel_for(config.trials, [&](std::size_t b, std::size_t e) {
        for (std::size_t t = b; t < e; ++t) {
          const auto nn = tree.knn(centers[t], K);
          PointSet stencil(d);
          for (auto idx : nn.indices) stencil.push_back(population[idx]);
          try {
            const auto sys = assemble_phs_system(stencil, centers[t], config.degree, ops, config.kernel);
            cond[t] = symmetric_condition_number(sys.matrix);
            ok[t] = std::isfinite(cond[t]) ? 1 : 0;
          } catch (const NumericError&) {
            ok[t] = 0;
          }
        }
      });
      ConditioningRow row{family, K, config.trials, 0, 0.0, 0.0};
      double sum = 0.0;
      std::size_t used = 0;
      for (std::size_t t = 0; t < config.trials; ++t) {
        if (ok[t]) {
          sum += cond[t];
          ++used;
        } else {
          ++row.excluded;
        }
      }
      row.avg_cond = used ? sum / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
      row.log10_avg_cond = std::log10(row.avg_cond);
      rows.push_back(row);
    }
  }
  return rows;
}

PointSet cartesian_grid(std::size_t per_side, std::size_t d) {
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= per_side;
  PointSet out(d);
  out.reserve(total);
  Vec x(d);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t code = c;
    for (std::size_t k = 0; k < d; ++k) {
      x[k] = (static_cast<double>(code % per_side) + 0.5) / static_cast<double>(per_side);
      code /= per_side;
    }
    out.push_back(x);
  }
  return out;
}

void write_conditioning_csv(const std::vector<ConditioningRow>& rows, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open " + path + " for writing");
  std::fprintf(f, "family,K,trials,excluded,avg_cond,log10_avg_cond\n");
  for (const auto& r : rows)
    std::fprintf(f, "%s,%zu,%zu,%zu,%.17g,%.17g\n", r.family.c_str(), r.K, r.trials, r.excluded, r.avg_cond,
                 r.log10_avg_cond);
  if (std::fclose(f) != 0) throw IoError("write failed for " + path);
}

}  // namespace nodegen
