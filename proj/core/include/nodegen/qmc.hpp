#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nodegen/pchip.hpp"
#include "nodegen/point_set.hpp"

namespace nodegen {

enum class QmcFamily { IrrationalLattice, TorusMinimizer };

const char* to_string(QmcFamily family);
QmcFamily parse_family(const std::string& name);

/// Parameters of the irrational lattice
///   { (frac(c1 + i/n), frac(i a_1), ..., frac(i a_{d-1})) : i = 1..n }.
struct LatticeParams {
  std::vector<double> alphas;
  double c1_offset = 0.5;
  bool permute_coordinates = true;

  /// sqrt(2), (sqrt(5)-1)/sqrt(2); the default for d = 3.
  static LatticeParams golden();
  static LatticeParams sqrt3_sqrt5();
  /// The rational pair 0.179373654819913, 0.531793804909494.
  static LatticeParams caption_pair();
  /// Two uniform draws from [0, 1).
  static LatticeParams random_pair(std::uint64_t seed);
  /// golden() for d = 3, square roots of consecutive primes otherwise.
  static LatticeParams for_dimension(std::size_t d);

  void validate(std::size_t d) const;
};

PointSet irrational_lattice(std::size_t n, const LatticeParams& params, std::size_t d);

/// First n Halton points (indices 1..n) with the first d primes as bases.
PointSet halton(std::size_t n, std::size_t d);

/// Flat-torus distance sqrt(sum_k min(dx_k^2, (1 - |dx_k|)^2)).
double periodic_distance(ConstPoint x, ConstPoint y);

struct TorusMinimizerParams {
  double s_exponent = 5.0;
  /// Iterations of the normalized-step schedule Delta_i / (t + step_offset).
  std::size_t schedule_iterations = 300;
  /// Cap on the subsequent gradient polish.
  std::size_t max_iterations = 6000;
  double step_offset = 10.0;
  std::uint64_t seed = 1;
  std::size_t restarts = 3;
  /// Polish stops once the largest per-point gradient shrinks by this factor.
  double gradient_tolerance = 1e-7;

  /// s = d + 2.
  static TorusMinimizerParams for_dimension(std::size_t d);
};

struct MinimizerResult {
  PointSet points;
  double energy = 0.0;
  bool converged = false;
  /// Energy after every accepted iteration of the winning restart.
  std::vector<double> energy_history;
};

/// Periodic Riesz s-energy sum_{i<j} |x_i - x_j|_~^{-s}.
double periodic_riesz_energy(const PointSet& points, double s);

MinimizerResult periodic_riesz_minimizer(std::size_t n, const TorusMinimizerParams& params,
                                         std::size_t d);

struct SeparationEntry {
  double mean_sep = 1.0;
  double min_sep = 1.0;
};

/// Periodized separation of elementary configurations for n = 1..n_max.
struct SeparationTable {
  QmcFamily family = QmcFamily::IrrationalLattice;
  std::vector<SeparationEntry> entries;  // entries[n - 1]

  std::size_t n_max() const noexcept { return entries.size(); }
  const SeparationEntry& at(std::size_t n) const { return entries.at(n - 1); }
  /// Running minimum of the means, nudged to be strictly decreasing.
  std::vector<double> regularized_means() const;
};

/// Nearest-neighbor distances of the central copy among the union of the
/// configuration and its 3^d - 1 integer translates.
SeparationEntry translated_copies_separation(const PointSet& points);
/// Nearest-neighbor distances measured with periodic_distance, capped at 1.
SeparationEntry periodic_separation(const PointSet& points);

SeparationTable tabulate_lattice_separation(std::size_t n_max, const LatticeParams& params,
                                            std::size_t d);
/// configs[n - 1] must hold n points.
SeparationTable tabulate_minimizer_separation(const std::vector<PointSet>& configs);

void write_separation_csv(const SeparationTable& table, const std::string& path);
SeparationTable read_separation_csv(const std::string& path, QmcFamily family);

/// Interpolated inverse of n -> mean separation, rounded to an integer count.
class LambdaInverse {
 public:
  explicit LambdaInverse(const SeparationTable& table);

  /// 0 for r > 1, n_max below the smallest tabulated mean, otherwise the
  /// rounded monotone cubic interpolant; throws DomainError for r <= 0.
  std::size_t operator()(double r) const;
  std::size_t n_max() const noexcept { return n_max_; }
  /// Regularized mean separation of n points (1 <= n <= n_max).
  double mean_separation(std::size_t n) const { return means_.at(n - 1); }

 private:
  std::size_t n_max_;
  std::vector<double> means_;
  Pchip curve_;
};

/// Directory holding minimizer fixtures: $NODEGEN_FIXTURES if set, else the
/// source-tree fixtures/ directory.
std::string default_fixture_dir();
std::string minimizer_fixture_path(const std::string& fixture_dir, std::size_t d, double s,
                                   std::size_t n);

/// Minimizers for n = 1..n_max: loaded from fixtures when present, otherwise
/// computed (and written back when write_missing is set).
std::vector<PointSet> torus_minimizers(std::size_t n_max, const TorusMinimizerParams& params,
                                       std::size_t d, const std::string& fixture_dir,
                                       bool write_missing = false);

/// Single configuration lookup with the same cache rules.
PointSet torus_minimizer_cached(std::size_t n, const TorusMinimizerParams& params, std::size_t d,
                                const std::string& fixture_dir, bool write_missing = false);

}  // namespace nodegen
