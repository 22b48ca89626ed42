#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nodegen/domain.hpp"
#include "nodegen/point_set.hpp"

namespace nodegen {

inline constexpr std::array<double, 7> kPercentileLevels = {1, 5, 25, 50, 75, 95, 99};

/// Linear interpolation between order statistics (position p/100 * (n - 1)).
double percentile(std::vector<double> values, double p);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // population variance
  double min = 0.0;
  double max = 0.0;
  std::array<double, 7> percentiles{};  // at kPercentileLevels

  double at_percentile(double level) const;
};

Summary summarize(const std::vector<double>& values);

struct NnStats {
  std::size_t k = 0;
  std::size_t count = 0;
  /// count * k distances, row i ascending: Delta^1(x_i) .. Delta^k(x_i).
  std::vector<double> distances;
  std::vector<Summary> per_order;  // per_order[j] summarizes Delta^(j+1)
  /// Mean of Delta^12 / Delta^2 and Delta^4 / Delta^1 (0 when k is too small).
  double mean_ratio_12_2 = 0.0;
  double mean_ratio_4_1 = 0.0;

  double at(std::size_t node, std::size_t order) const { return distances[node * k + order - 1]; }
  std::vector<double> order(std::size_t j) const;  // Delta^j for every node
};

/// Exact k-nearest distances (self excluded). Throws ConfigError when N <= k.
NnStats nn_distances(const PointSet& nodes, std::size_t k);

struct RatioStats {
  std::vector<double> values;  // rho(x_i) / Delta(x_i)
  Summary summary;
  double p5 = 0.0;
  double p95 = 0.0;
  std::vector<std::size_t> outliers;  // indices with values outside [p5, p95]
};

RatioStats ratio_stats(const PointSet& nodes, const RadialDensity& rho);

struct HoleEstimate {
  std::vector<double> radii;  // one per sample
  PointSet centers;           // final ascent positions
  double max_radius = 0.0;
};

/// Approximate Voronoi-vertex hole radii: samples uniform points in the
/// domain and climbs the distance-to-nodes function by a subgradient ascent
/// with backtracking; steps leaving the domain are rejected.
HoleEstimate hole_radius_estimate(const PointSet& nodes, const Domain& domain, std::size_t n_samples,
                                  std::size_t ascent_steps, std::uint64_t seed);

struct SeparationSummary {
  double min_sep = 0.0;
  double mean_nn = 0.0;
};

SeparationSummary separation_summary(const PointSet& nodes);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

std::string summary_json(const Summary& s);
/// Aggregates of an NnStats and optional RatioStats as JSON.
std::string stats_json(const NnStats& nn, const RatioStats* ratios);
/// Per-node distances as CSV with header d1,...,dk.
void write_distances_csv(const NnStats& nn, const std::string& path);
/// Per-sample hole radii as CSV with header radius.
void write_holes_csv(const HoleEstimate& holes, const std::string& path);

}  // namespace nodegen
