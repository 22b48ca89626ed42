#include "nodegen/repel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "nodegen/error.hpp"
#include "nodegen/parallel.hpp"

namespace nodegen {

namespace {

// Accumulates sum_k w_k (x - y_k) |x - y_k|^-(s+2) into `force` and returns
// sum_k w_k |x - y_k|^-s.
template <class NeighborAt, class WeightAt>
double accumulate(ConstPoint x, std::size_t count, const NeighborAt& neighbor, const WeightAt& weight, double s,
                  std::size_t self_index, const std::vector<std::size_t>* ids, MutPoint force) {
  const std::size_t d = x.size();
  std::fill(force.begin(), force.end(), 0.0);
  double potential = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const ConstPoint y = neighbor(k);
    double r2 = 0.0;
    for (std::size_t l = 0; l < d; ++l) {
      const double t = x[l] - y[l];
      r2 += t * t;
    }
    if (r2 == 0.0) throw DegeneratePairError(self_index, ids ? (*ids)[k] : k);
    const double w = weight(k);
    const double rs = std::pow(r2, -0.5 * s);
    potential += w * rs;
    const double c = w * rs / r2;
    for (std::size_t l = 0; l < d; ++l) force[l] += c * (x[l] - y[l]);
  }
  return potential;
}

Vec combine(ConstPoint x, double rho, double s, const Vec& force, double potential, const RadialDensity* density) {
  const std::size_t d = x.size();
  Vec g(d);
  const double a = s * std::pow(rho, s);
  for (std::size_t l = 0; l < d; ++l) g[l] = a * force[l];
  if (density) {
    Vec grad(d);
    density->gradient_at(x, grad);
    const double b = s * std::pow(rho, s - 1.0) * potential;
    for (std::size_t l = 0; l < d; ++l) g[l] -= b * grad[l];
  }
  return g;
}

void check_weights(std::span<const double> weights, std::size_t count) {
  if (!weights.empty() && weights.size() != count) throw ConfigError("one weight per neighbor is required");
}

}  // namespace

void RepelConfig::validate(std::size_t d) const {
  if (!(s > static_cast<double>(d))) throw ConfigError("repel exponent s must exceed the dimension");
  if (K < 1) throw ConfigError("repel needs K >= 1");
  if (!(C2 > 0.0)) throw ConfigError("step offset C2 must be positive");
  if (refresh_every < 1) throw ConfigError("refresh interval must be at least 1");
  if (!(boundary_weakening > 0.0 && boundary_weakening <= 1.0))
    throw ConfigError("boundary weakening must lie in (0, 1]");
}

Vec partial_gradient(ConstPoint x, const PointSet& neighbors, double rho, double s, std::span<const double> weights,
                     std::size_t self_index) {
  check_weights(weights, neighbors.size());
  Vec force(x.size());
  const double potential = accumulate(
      x, neighbors.size(), [&](std::size_t k) { return neighbors[k]; },
      [&](std::size_t k) { return weights.empty() ? 1.0 : weights[k]; }, s, self_index, nullptr, force);
  return combine(x, rho, s, force, potential, nullptr);
}

Vec full_gradient(ConstPoint x, const PointSet& neighbors, const RadialDensity& rho, double s,
                  std::span<const double> weights, std::size_t self_index) {
  check_weights(weights, neighbors.size());
  Vec force(x.size());
  const double potential = accumulate(
      x, neighbors.size(), [&](std::size_t k) { return neighbors[k]; },
      [&](std::size_t k) { return weights.empty() ? 1.0 : weights[k]; }, s, self_index, nullptr, force);
  return combine(x, rho(x), s, force, potential, &rho);
}

NeighborLists build_neighbor_lists(const PointSet& positions, std::size_t K) {
  const std::size_t n = positions.size();
  NeighborLists lists;
  lists.K = n == 0 ? 0 : std::min(K, n - 1);
  lists.indices.assign(n * lists.K, 0);
  if (lists.K == 0) return lists;
  const KdTree tree(positions);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    std::vector<std::uint32_t> idx;
    std::vector<double> d2;
    for (std::size_t i = b; i < e; ++i) {
      tree.knn_into(positions[i], lists.K, static_cast<std::uint32_t>(i), idx, d2);
      std::copy(idx.begin(), idx.end(), lists.indices.begin() + static_cast<std::ptrdiff_t>(i * lists.K));
    }
  });
  return lists;
}

NodeSet repel_step(const NodeSet& nodes, std::size_t t, const RepelConfig& config, const Domain& domain,
                   const RadialDensity& rho, const NeighborLists& lists, StepStats* stats) {
  const std::size_t n = nodes.size();
  const std::size_t d = nodes.dim();
  NodeSet out = nodes;
  if (n < 2 || lists.K == 0) {
    if (stats) *stats = {t, 0.0, 0.0, 0.0};
    return out;
  }
  if (lists.indices.size() != n * lists.K) throw ConfigError("neighbor lists do not match the node count");

  std::vector<double> delta(n), ratio(n);
  std::vector<std::uint8_t> moved(n, 0);
  const double denom = static_cast<double>(t) + config.C2;
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    Vec force(d), dest(d), pulled(d);
    std::vector<std::size_t> ids(lists.K);
    for (std::size_t i = b; i < e; ++i) {
      const ConstPoint x = nodes.positions[i];
      const auto row = lists.row(i);
      for (std::size_t k = 0; k < row.size(); ++k) ids[k] = row[k];
      const double potential = accumulate(
          x, row.size(), [&](std::size_t k) { return nodes.positions[row[k]]; },
          [&](std::size_t k) { return nodes.pinned[row[k]] ? config.boundary_weakening : 1.0; }, config.s, i,
          &ids, force);
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < row.size(); ++k) nearest = std::min(nearest, squared_distance(x, nodes.positions[row[k]]));
      nearest = std::sqrt(nearest);
      delta[i] = nearest;
      const double rho_i = rho(x);
      ratio[i] = rho_i / nearest;
      if (nodes.pinned[i]) continue;
      const Vec g = combine(x, rho_i, config.s, force, potential, config.use_full_gradient ? &rho : nullptr);
      double gn = 0.0;
      for (double v : g) gn += v * v;
      gn = std::sqrt(gn);
      if (!(gn >= config.zero_gradient) || !std::isfinite(gn)) continue;
      const double step = nearest / denom / gn;
      for (std::size_t l = 0; l < d; ++l) dest[l] = x[l] + step * g[l];
      MutPoint target = out.positions[i];
      if (domain.contains(dest)) {
        std::copy(dest.begin(), dest.end(), target.begin());
        moved[i] = 1;
      } else if (domain.has_pullback()) {
        domain.pullback(dest, pulled);
        std::copy(pulled.begin(), pulled.end(), target.begin());
        moved[i] = 1;
      }
    }
  });

  if (stats) {
    stats->t = t;
    stats->min_sep = *std::min_element(delta.begin(), delta.end());
    double sr = 0.0;
    std::size_t mv = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sr += ratio[i];
      mv += moved[i];
    }
    stats->mean_ratio = sr / static_cast<double>(n);
    stats->moved_fraction = static_cast<double>(mv) / static_cast<double>(n);
  }
  return out;
}

NodeSet run_repel(const NodeSet& nodes, const RepelConfig& config, const Domain& domain, const RadialDensity& rho,
                  const StepObserver& observer) {
  config.validate(nodes.dim());
  if (config.T == 0) return nodes;
  if (nodes.size() < 2) throw ConfigError("repel needs at least two nodes");
  NodeSet current = nodes;
  NeighborLists lists;
  for (std::size_t t = 0; t < config.T; ++t) {
    if (t % config.refresh_every == 0) lists = build_neighbor_lists(current.positions, config.K);
    StepStats stats;
    current = repel_step(current, t, config, domain, rho, lists, &stats);
    if (observer) observer(stats);
  }
  return current;
}

std::vector<std::uint8_t> detect_boundary(const PointSet& positions, const Domain& domain) {
  const std::size_t n = positions.size();
  const std::size_t d = positions.dim();
  std::vector<std::uint8_t> flags(n, 0);
  if (n < 2) return flags;
  const KdTree tree(positions);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    Vec probe(d);
    for (std::size_t i = b; i < e; ++i) {
      const ConstPoint x = positions[i];
      const double delta = tree.nearest_distance(x, static_cast<std::uint32_t>(i));
      for (std::size_t l = 0; l < d && !flags[i]; ++l)
        for (double sign : {-1.0, 1.0}) {
          std::copy(x.begin(), x.end(), probe.begin());
          probe[l] += sign * delta;
          if (!domain.contains(probe)) {
            flags[i] = 1;
            break;
          }
        }
    }
  });
  return flags;
}

void write_diagnostics_csv(const std::vector<StepStats>& stats, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open " + path + " for writing");
  std::fprintf(f, "t,min_sep,mean_ratio,moved_fraction\n");
  for (const auto& s : stats) std::fprintf(f, "%zu,%.17g,%.17g,%.17g\n", s.t, s.min_sep, s.mean_ratio, s.moved_fraction);
  if (std::fclose(f) != 0) throw IoError("write failed for " + path);
}

}  // namespace nodegen
