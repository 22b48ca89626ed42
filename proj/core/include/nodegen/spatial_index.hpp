#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "nodegen/point_set.hpp"

namespace nodegen {

struct KnnResult {
  std::vector<std::uint32_t> indices;
  std::vector<double> distances;  // ascending
  bool short_count = false;       // fewer than K candidates were available
};

/// Immutable k-d tree over a snapshot of a point set. Queries return exact
/// Euclidean nearest neighbors; equal distances are ordered by index.
class KdTree {
 public:
  static constexpr std::uint32_t kNoExclude = std::numeric_limits<std::uint32_t>::max();

  KdTree() = default;
  explicit KdTree(const PointSet& points, std::size_t leaf_size = 12);

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dim() const noexcept { return points_.dim(); }
  const PointSet& points() const noexcept { return points_; }

  /// K nearest neighbors of x; the point with index `exclude` is skipped.
  KnnResult knn(ConstPoint x, std::size_t k, std::uint32_t exclude = kNoExclude) const;

  /// Same as knn() but writes into caller buffers (resized to the found count).
  bool knn_into(ConstPoint x, std::size_t k, std::uint32_t exclude,
                std::vector<std::uint32_t>& indices, std::vector<double>& sq_distances) const;

  /// Distance to the nearest indexed point (skipping `exclude`); +inf if none.
  double nearest_distance(ConstPoint x, std::uint32_t exclude = kNoExclude) const;

  /// Indices of all points with distance strictly below radius.
  std::vector<std::uint32_t> within(ConstPoint x, double radius) const;

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::uint32_t left = 0;   // child indices; 0 means leaf
    std::uint32_t right = 0;
    std::uint32_t axis = 0;
    double split = 0.0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::size_t leaf_size);

  PointSet points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::vector<double> bbox_lo_;  // per node bounding box, dim entries each
  std::vector<double> bbox_hi_;
};

/// Linear-scan reference with the same ordering rules as KdTree::knn.
KnnResult brute_force_knn(const PointSet& points, ConstPoint x, std::size_t k,
                          std::uint32_t exclude = KdTree::kNoExclude);

}  // namespace nodegen
