#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nodegen/domain.hpp"
#include "nodegen/node_set.hpp"
#include "nodegen/spatial_index.hpp"

namespace nodegen {

struct RepelConfig {
  double s = 5.0;
  std::size_t K = 30;
  std::size_t T = 30;
  double C2 = 10.0;
  std::size_t refresh_every = 10;
  bool use_full_gradient = false;
  /// Multiplies force contributions from pinned neighbors.
  double boundary_weakening = 1.0;
  /// Gradients with smaller norm leave the node in place.
  double zero_gradient = 1e-30;

  void validate(std::size_t d) const;
};

/// s rho^s sum_k w_k (x - y_k) / |x - y_k|^(s+2): the negative gradient of
/// sum_k w_k rho^s |x - y_k|^-s with rho held fixed. Empty weights mean 1.
/// A zero distance throws DegeneratePairError(self_index, k).
Vec partial_gradient(ConstPoint x, const PointSet& neighbors, double rho, double s,
                     std::span<const double> weights = {}, std::size_t self_index = 0);

/// Negative gradient of sum_k w_k rho(x)^s |x - y_k|^-s including the
/// density-gradient term -s rho^(s-1) grad(rho) sum_k w_k |x - y_k|^-s.
Vec full_gradient(ConstPoint x, const PointSet& neighbors, const RadialDensity& rho, double s,
                  std::span<const double> weights = {}, std::size_t self_index = 0);

/// Fixed K-nearest neighbor lists j(i, k) taken from a snapshot.
struct NeighborLists {
  std::size_t K = 0;
  std::vector<std::uint32_t> indices;  // N * K, row i holds the neighbors of node i

  std::span<const std::uint32_t> row(std::size_t i) const { return {indices.data() + i * K, K}; }
};

/// Neighbor lists from a k-d tree built on the given positions (self excluded).
/// K is reduced to N - 1 when fewer nodes exist.
NeighborLists build_neighbor_lists(const PointSet& positions, std::size_t K);

struct StepStats {
  std::size_t t = 0;
  double min_sep = 0.0;     // over the current neighbor lists
  double mean_ratio = 0.0;  // mean rho(x_i) / Delta(x_i)
  double moved_fraction = 0.0;
};

/// One synchronous update x_i += Delta_i / (t + C2) * g_i / |g_i| computed
/// from the snapshot `nodes`. Delta_i is the nearest listed neighbor distance.
NodeSet repel_step(const NodeSet& nodes, std::size_t t, const RepelConfig& config, const Domain& domain,
                   const RadialDensity& rho, const NeighborLists& lists, StepStats* stats = nullptr);

using StepObserver = std::function<void(const StepStats&)>;

/// T steps with neighbor lists rebuilt at t = 0 and every refresh_every steps.
NodeSet run_repel(const NodeSet& nodes, const RepelConfig& config, const Domain& domain,
                  const RadialDensity& rho, const StepObserver& observer = {});

/// Flags nodes for which some probe x_i +- Delta(x_i) e_l leaves the domain.
std::vector<std::uint8_t> detect_boundary(const PointSet& positions, const Domain& domain);

/// Writes diagnostics as CSV with header t,min_sep,mean_ratio,moved_fraction.
void write_diagnostics_csv(const std::vector<StepStats>& stats, const std::string& path);

}  // namespace nodegen
