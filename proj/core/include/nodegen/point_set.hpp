#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "nodegen/error.hpp"

namespace nodegen {

using Vec = std::vector<double>;
using ConstPoint = std::span<const double>;
using MutPoint = std::span<double>;

/// Flat row-major storage for N points in R^d.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::size_t count) : dim_(dim), coords_(dim * count, 0.0) {}
  PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    if (dim_ == 0 || coords_.size() % dim_ != 0)
      throw ConfigError("PointSet: coordinate count is not a multiple of the dimension");
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  ConstPoint operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  MutPoint operator[](std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  void push_back(ConstPoint p) { coords_.insert(coords_.end(), p.begin(), p.end()); }
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }
  void clear() { coords_.clear(); }
  void append(const PointSet& other) {
    coords_.insert(coords_.end(), other.coords_.begin(), other.coords_.end());
  }

  const std::vector<double>& coords() const noexcept { return coords_; }
  std::vector<double>& coords() noexcept { return coords_; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

inline double squared_distance(ConstPoint a, ConstPoint b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

inline double distance(ConstPoint a, ConstPoint b) { return std::sqrt(squared_distance(a, b)); }

inline double norm(ConstPoint a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

/// Axis-aligned box [lo, hi].
struct Box {
  Vec lo;
  Vec hi;

  static Box unit(std::size_t dim) { return {Vec(dim, 0.0), Vec(dim, 1.0)}; }
  static Box cube(std::size_t dim, double lo, double hi) { return {Vec(dim, lo), Vec(dim, hi)}; }

  std::size_t dim() const noexcept { return lo.size(); }
  bool contains(ConstPoint p) const {
    for (std::size_t k = 0; k < lo.size(); ++k)
      if (!(p[k] >= lo[k] && p[k] <= hi[k])) return false;
    return true;
  }
};

}  // namespace nodegen
