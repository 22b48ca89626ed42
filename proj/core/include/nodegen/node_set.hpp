#pragma once

#include <cstdint>
#include <vector>

#include "nodegen/point_set.hpp"

namespace nodegen {

/// Node positions with per-node flags.
struct NodeSet {
  PointSet positions;
  std::vector<std::uint8_t> pinned;    // immovable during repel
  std::vector<std::uint8_t> boundary;  // set by detect_boundary

  NodeSet() = default;
  explicit NodeSet(PointSet p)
      : positions(std::move(p)), pinned(positions.size(), 0), boundary(positions.size(), 0) {}

  std::size_t size() const noexcept { return positions.size(); }
  std::size_t dim() const noexcept { return positions.dim(); }

  void append(const PointSet& points, bool is_pinned) {
    positions.append(points);
    pinned.resize(positions.size(), is_pinned ? 1 : 0);
    boundary.resize(positions.size(), 0);
  }

  friend bool operator==(const NodeSet&, const NodeSet&) = default;
};

}  // namespace nodegen
