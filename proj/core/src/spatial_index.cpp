#include "nodegen/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace nodegen {

namespace {

// Candidate list kept sorted by (squared distance, index).
class Candidates {
 public:
  Candidates(std::size_t k, std::vector<std::uint32_t>& idx, std::vector<double>& d2)
      : k_(k), idx_(idx), d2_(d2) {
    idx_.clear();
    d2_.clear();
  }

  bool full() const { return idx_.size() >= k_; }
  double worst() const {
    return full() ? d2_.back() : std::numeric_limits<double>::infinity();
  }

  void offer(double d2, std::uint32_t index) {
    if (k_ == 0) return;
    if (full()) {
      if (d2 > d2_.back() || (d2 == d2_.back() && index > idx_.back())) return;
      idx_.pop_back();
      d2_.pop_back();
    }
    std::size_t pos = d2_.size();
    while (pos > 0 && (d2_[pos - 1] > d2 || (d2_[pos - 1] == d2 && idx_[pos - 1] > index))) --pos;
    d2_.insert(d2_.begin() + static_cast<std::ptrdiff_t>(pos), d2);
    idx_.insert(idx_.begin() + static_cast<std::ptrdiff_t>(pos), index);
  }

 private:
  std::size_t k_;
  std::vector<std::uint32_t>& idx_;
  std::vector<double>& d2_;
};

}  // namespace

KdTree::KdTree(const PointSet& points, std::size_t leaf_size) : points_(points) {
  const std::size_t n = points_.size();
  if (n > std::numeric_limits<std::uint32_t>::max() - 1)
    throw ConfigError("KdTree: too many points");
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  if (n == 0) return;
  nodes_.reserve(2 * n / std::max<std::size_t>(1, leaf_size) + 2);
  build(0, static_cast<std::uint32_t>(n), std::max<std::size_t>(1, leaf_size));
}

std::uint32_t KdTree::build(std::uint32_t begin, std::uint32_t end, std::size_t leaf_size) {
  const std::size_t d = points_.dim();
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({begin, end, 0, 0, 0, 0.0});
  bbox_lo_.resize(bbox_lo_.size() + d, std::numeric_limits<double>::infinity());
  bbox_hi_.resize(bbox_hi_.size() + d, -std::numeric_limits<double>::infinity());
  for (std::uint32_t i = begin; i < end; ++i) {
    const auto p = points_[order_[i]];
    for (std::size_t k = 0; k < d; ++k) {
      bbox_lo_[id * d + k] = std::min(bbox_lo_[id * d + k], p[k]);
      bbox_hi_[id * d + k] = std::max(bbox_hi_[id * d + k], p[k]);
    }
  }
  if (end - begin <= leaf_size) return id;

  std::uint32_t axis = 0;
  double widest = -1.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double w = bbox_hi_[id * d + k] - bbox_lo_[id * d + k];
    if (w > widest) {
      widest = w;
      axis = static_cast<std::uint32_t>(k);
    }
  }
  if (widest <= 0.0) return id;  // all points identical; keep as a leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = points_[a][axis];
                     const double pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const double split = points_[order_[mid]][axis];
  const std::uint32_t left = build(begin, mid, leaf_size);
  const std::uint32_t right = build(mid, end, leaf_size);
  nodes_[id].left = left;
  nodes_[id].right = right;
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  return id;
}

bool KdTree::knn_into(ConstPoint x, std::size_t k, std::uint32_t exclude,
                      std::vector<std::uint32_t>& indices, std::vector<double>& sq_distances) const {
  Candidates best(k, indices, sq_distances);
  if (nodes_.empty() || k == 0) return k > 0;
  const std::size_t d = points_.dim();

  auto box_distance = [&](std::uint32_t node) {
    double s = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double lo = bbox_lo_[node * d + a];
      const double hi = bbox_hi_[node * d + a];
      double t = 0.0;
      if (x[a] < lo)
        t = lo - x[a];
      else if (x[a] > hi)
        t = x[a] - hi;
      s += t * t;
    }
    return s;
  };

  std::vector<std::pair<double, std::uint32_t>> stack;
  stack.reserve(64);
  stack.emplace_back(box_distance(0), 0);
  while (!stack.empty()) {
    const auto [bound, id] = stack.back();
    stack.pop_back();
    if (bound > best.worst()) continue;
    const Node& node = nodes_[id];
    if (node.left == 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t p = order_[i];
        if (p == exclude) continue;
        best.offer(squared_distance(x, points_[p]), p);
      }
      continue;
    }
    const double bl = box_distance(node.left);
    const double br = box_distance(node.right);
    // Push the farther child first so the nearer one is visited next.
    if (bl <= br) {
      stack.emplace_back(br, node.right);
      stack.emplace_back(bl, node.left);
    } else {
      stack.emplace_back(bl, node.left);
      stack.emplace_back(br, node.right);
    }
  }
  return indices.size() == k;
}

KnnResult KdTree::knn(ConstPoint x, std::size_t k, std::uint32_t exclude) const {
  KnnResult out;
  std::vector<double> d2;
  const bool complete = knn_into(x, k, exclude, out.indices, d2);
  out.short_count = !complete;
  out.distances.resize(d2.size());
  std::transform(d2.begin(), d2.end(), out.distances.begin(), [](double v) { return std::sqrt(v); });
  return out;
}

double KdTree::nearest_distance(ConstPoint x, std::uint32_t exclude) const {
  std::vector<std::uint32_t> idx;
  std::vector<double> d2;
  knn_into(x, 1, exclude, idx, d2);
  return d2.empty() ? std::numeric_limits<double>::infinity() : std::sqrt(d2.front());
}

std::vector<std::uint32_t> KdTree::within(ConstPoint x, double radius) const {
  std::vector<std::uint32_t> out;
  if (nodes_.empty()) return out;
  const std::size_t d = points_.dim();
  const double r2 = radius * radius;
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const std::uint32_t id = stack.back();
    stack.pop_back();
    double s = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double lo = bbox_lo_[id * d + a];
      const double hi = bbox_hi_[id * d + a];
      const double t = x[a] < lo ? lo - x[a] : (x[a] > hi ? x[a] - hi : 0.0);
      s += t * t;
    }
    if (s >= r2) continue;
    const Node& node = nodes_[id];
    if (node.left == 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i)
        if (squared_distance(x, points_[order_[i]]) < r2) out.push_back(order_[i]);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

KnnResult brute_force_knn(const PointSet& points, ConstPoint x, std::size_t k,
                          std::uint32_t exclude) {
  std::vector<std::pair<double, std::uint32_t>> all;
  all.reserve(points.size());
  for (std::uint32_t i = 0; i < points.size(); ++i)
    if (i != exclude) all.emplace_back(squared_distance(x, points[i]), i);
  std::sort(all.begin(), all.end());
  KnnResult out;
  const std::size_t m = std::min(k, all.size());
  out.short_count = m < k;
  for (std::size_t i = 0; i < m; ++i) {
    out.indices.push_back(all[i].second);
    out.distances.push_back(std::sqrt(all[i].first));
  }
  return out;
}

}  // namespace nodegen
