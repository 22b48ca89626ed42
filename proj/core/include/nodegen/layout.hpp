#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nodegen/domain.hpp"
#include "nodegen/qmc.hpp"

namespace nodegen {

enum class Adjacency { Face, Vertex };

const char* to_string(Adjacency adjacency);
Adjacency parse_adjacency(const std::string& name);

/// Elementary configurations for n = 1..n_max together with their
/// separation table and its inverse.
class QmcSource {
 public:
  static QmcSource lattice(std::size_t n_max, const LatticeParams& params, std::size_t d);
  static QmcSource minimizers(std::size_t n_max, const TorusMinimizerParams& params, std::size_t d,
                              const std::string& fixture_dir);
  /// Uses caller-supplied configurations (configs[n - 1] holds n points).
  static QmcSource from_configs(QmcFamily family, std::vector<PointSet> configs, SeparationTable table);

  QmcFamily family() const noexcept { return family_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t n_max() const noexcept { return configs_.size(); }
  const PointSet& config(std::size_t n) const { return configs_.at(n - 1); }
  const SeparationTable& table() const noexcept { return table_; }
  const LambdaInverse& lambda() const noexcept { return lambda_; }

 private:
  QmcSource(QmcFamily family, std::size_t dim, std::vector<PointSet> configs, SeparationTable table);

  QmcFamily family_;
  std::size_t dim_;
  std::vector<PointSet> configs_;
  SeparationTable table_;
  LambdaInverse lambda_;
};

struct LayoutConfig {
  /// Voxels per side; 0 selects ceil(mean_sep(n_max) / min sampled rho), clamped to [4, 256].
  std::size_t M = 0;
  double c_d = 1.0;
  Adjacency adjacency = Adjacency::Face;
  /// Seeds the per-voxel coordinate permutations of lattice fills.
  std::uint64_t seed = 1;
};

/// M^d voxels tiling [0,1]^d; voxel m has multi-index (i_0, ..., i_{d-1})
/// with m = sum_k i_k M^k.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(std::size_t dim, std::size_t m_per_side);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t m_per_side() const noexcept { return m_; }
  std::size_t voxel_count() const noexcept { return count_; }
  double side() const noexcept { return 1.0 / static_cast<double>(m_); }

  std::vector<std::size_t> multi_index(std::size_t m) const;
  std::size_t flat_index(const std::vector<std::size_t>& idx) const;
  Vec corner(std::size_t m) const;  // lowest-coordinate corner c_m
  Vec center(std::size_t m) const;  // z_m

  /// Per-voxel data filled in by plan_layout.
  std::vector<double> rho_bar;
  std::vector<std::uint8_t> selected;
  std::vector<std::uint32_t> node_count;

 private:
  std::size_t dim_ = 0;
  std::size_t m_ = 0;
  std::size_t count_ = 0;
};

/// m is selected iff some adjacent voxel (itself included) has a corner
/// inside the domain. Returns the number of inclusion tests made.
std::size_t select_voxels(VoxelGrid& grid, const Domain& domain, Adjacency adjacency);

/// lambda(rho_bar * M).
std::size_t voxel_node_count(double rho_bar, std::size_t M, const LambdaInverse& lambda);

/// Scaled, inset copy of the n-point elementary configuration inside voxel m.
PointSet fill_voxel(const VoxelGrid& grid, std::size_t m, std::size_t n, const QmcSource& source,
                    double c_d, std::uint64_t seed);

struct SaturationResult {
  PointSet added;
  std::vector<std::size_t> voxels;         // voxel of each added node
  std::size_t density_evaluations = 0;
  std::size_t passes = 0;
};

/// Greedy placement of voxel centers in selected voxels with no nodes,
/// taken in increasing rho(z_m) order (ties by index). A center is accepted
/// when its distance to every existing node and every accepted center
/// exceeds rho(z_m).
SaturationResult saturate(const VoxelGrid& grid, const PointSet& existing, const RadialDensity& rho);

/// Nodes inside the domain, order preserved.
PointSet cleanup(const PointSet& nodes, const Domain& domain);

struct LayoutPlan {
  VoxelGrid grid;
  std::size_t corner_density_evaluations = 0;
  std::size_t inclusion_tests = 0;
  std::size_t predicted_nodes = 0;  // sum of n_m over selected voxels
};

std::size_t auto_voxel_count(const Domain& domain, const RadialDensity& rho, const QmcSource& source);

/// Steps 2 and 3 without placing nodes: selection, corner averages, counts.
/// Domain and density must be in the unit-cube frame.
LayoutPlan plan_layout(const Domain& domain, const RadialDensity& rho, const LayoutConfig& config,
                       const QmcSource& source);

struct LayoutResult {
  LayoutPlan plan;
  PointSet nodes;
  std::size_t filled = 0;
  std::size_t saturated = 0;
  std::size_t removed = 0;
  std::size_t saturate_density_evaluations = 0;
};

/// Steps 2 to 5: plan, fill, saturate, cleanup.
LayoutResult build_layout(const Domain& domain, const RadialDensity& rho, const LayoutConfig& config,
                          const QmcSource& source);

/// Voxel counts and selection flags as a JSON document.
std::string layout_json(const LayoutResult& result);

}  // namespace nodegen
