#include "nodegen/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "json.hpp"
#include "nodegen/error.hpp"
#include "nodegen/parallel.hpp"
#include "nodegen/rng.hpp"
#include "nodegen/spatial_index.hpp"

namespace nodegen {

namespace {

double sorted_percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

// Minimum-norm point of the convex hull of `vecs` (Frank-Wolfe with exact
// line search; the hull is tiny so a fixed iteration count suffices).
Vec min_norm_hull_point(const std::vector<Vec>& vecs) {
  Vec x = vecs.front();
  const std::size_t d = x.size();
  for (int it = 0; it < 64; ++it) {
    std::size_t best = 0;
    double best_dot = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += vecs[i][k] * x[k];
      if (dot < best_dot) {
        best_dot = dot;
        best = i;
      }
    }
    double xx = 0.0, xv = 0.0, vv = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      xx += x[k] * x[k];
      xv += x[k] * vecs[best][k];
      vv += vecs[best][k] * vecs[best][k];
    }
    const double denom = xx - 2.0 * xv + vv;
    if (denom <= 0.0 || xx - xv <= 1e-15 * xx) break;
    const double gamma = std::clamp((xx - xv) / denom, 0.0, 1.0);
    for (std::size_t k = 0; k < d; ++k) x[k] += gamma * (vecs[best][k] - x[k]);
  }
  return x;
}

}  // namespace

double percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return sorted_percentile(values, p);
}

double Summary::at_percentile(double level) const {
  for (std::size_t i = 0; i < kPercentileLevels.size(); ++i)
    if (kPercentileLevels[i] == level) return percentiles[i];
  throw ConfigError("percentile level not tabulated");
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.variance = sq / static_cast<double>(values.size());
  s.min = sorted.front();
  s.max = sorted.back();
  for (std::size_t i = 0; i < kPercentileLevels.size(); ++i) s.percentiles[i] = sorted_percentile(sorted, kPercentileLevels[i]);
  return s;
}

std::vector<double> NnStats::order(std::size_t j) const {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = at(i, j);
  return out;
}

NnStats nn_distances(const PointSet& nodes, std::size_t k) {
  if (k < 1) throw ConfigError("neighbor order k must be at least 1");
  if (nodes.size() <= k)
    throw ConfigError("need more than " + std::to_string(k) + " nodes for " + std::to_string(k) + "-NN statistics");
  NnStats st;
  st.k = k;
  st.count = nodes.size();
  st.distances.assign(st.count * k, 0.0);
  const KdTree tree(nodes);
  parallel_for(st.count, [&](std::size_t b, std::size_t e) {
    std::vector<std::uint32_t> idx;
    std::vector<double> d2;
    for (std::size_t i = b; i < e; ++i) {
      tree.knn_into(nodes[i], k, static_cast<std::uint32_t>(i), idx, d2);
      for (std::size_t j = 0; j < k; ++j) st.distances[i * k + j] = std::sqrt(d2[j]);
    }
  });
  for (std::size_t j = 1; j <= k; ++j) st.per_order.push_back(summarize(st.order(j)));
  auto mean_ratio = [&](std::size_t num, std::size_t den) {
    if (k < std::max(num, den)) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < st.count; ++i) s += st.at(i, num) / st.at(i, den);
    return s / static_cast<double>(st.count);
  };
  st.mean_ratio_12_2 = mean_ratio(12, 2);
  st.mean_ratio_4_1 = mean_ratio(4, 1);
  return st;
}

RatioStats ratio_stats(const PointSet& nodes, const RadialDensity& rho) {
  if (nodes.size() < 2) throw ConfigError("ratio statistics need at least two nodes");
  RatioStats rs;
  const KdTree tree(nodes);
  rs.values.resize(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double delta = tree.nearest_distance(nodes[i], static_cast<std::uint32_t>(i));
      if (delta == 0.0) throw DegeneratePairError(i, tree.knn(nodes[i], 1, static_cast<std::uint32_t>(i)).indices[0]);
      rs.values[i] = rho(nodes[i]) / delta;
    }
  });
  rs.summary = summarize(rs.values);
  rs.p5 = rs.summary.at_percentile(5);
  rs.p95 = rs.summary.at_percentile(95);
  for (std::size_t i = 0; i < rs.values.size(); ++i)
    if (rs.values[i] < rs.p5 || rs.values[i] > rs.p95) rs.outliers.push_back(i);
  return rs;
}

HoleEstimate hole_radius_estimate(const PointSet& nodes, const Domain& domain, std::size_t n_samples,
                                  std::size_t ascent_steps, std::uint64_t seed) {
  const std::size_t d = nodes.dim();
  if (nodes.size() < d + 1) throw ConfigError("hole estimation needs at least d + 1 nodes");
  const KdTree tree(nodes);
  HoleEstimate out;
  out.radii.assign(n_samples, 0.0);
  out.centers = PointSet(d, n_samples);

  // Samples are drawn sequentially so the set does not depend on threads.
  Rng rng(mix_seed(seed, 0x401e));
  const Box& box = domain.bounding_box;
  for (std::size_t i = 0; i < n_samples; ++i) {
    MutPoint y = out.centers[i];
    for (int attempt = 0; attempt < 100000; ++attempt) {
      for (std::size_t k = 0; k < d; ++k) y[k] = rng.uniform(box.lo[k], box.hi[k]);
      if (domain.contains(y)) break;
    }
  }

  const std::size_t probe_k = std::min(nodes.size(), 4 * d + 4);
  parallel_for(n_samples, [&](std::size_t b, std::size_t e) {
    std::vector<std::uint32_t> idx;
    std::vector<double> d2;
    Vec trial(d);
    for (std::size_t s = b; s < e; ++s) {
      MutPoint y = out.centers[s];
      double f = tree.nearest_distance(y);
      double h = 0.5 * f;
      for (std::size_t step = 0; step < ascent_steps && h > 1e-9 * (f + 1e-300); ++step) {
        tree.knn_into(y, probe_k, KdTree::kNoExclude, idx, d2);
        std::vector<Vec> grads;
        for (std::size_t j = 0; j < idx.size(); ++j) {
          const double r = std::sqrt(d2[j]);
          if (r > f + h) break;
          Vec g(d);
          const auto x = nodes[idx[j]];
          for (std::size_t k = 0; k < d; ++k) g[k] = r > 0.0 ? (y[k] - x[k]) / r : 0.0;
          grads.push_back(std::move(g));
        }
        const Vec dir = min_norm_hull_point(grads);
        const double dn = norm(dir);
        if (dn < 1e-12) {
          h *= 0.5;  // inside the hull of the active gradients: shrink the active set
          continue;
        }
        for (std::size_t k = 0; k < d; ++k) trial[k] = y[k] + h * dir[k] / dn;
        const double ft = domain.contains(trial) ? tree.nearest_distance(trial) : -1.0;
        if (ft > f) {
          std::copy(trial.begin(), trial.end(), y.begin());
          f = ft;
          h *= 1.5;
        } else {
          h *= 0.5;
        }
      }
      out.radii[s] = f;
    }
  });
  out.max_radius = out.radii.empty() ? 0.0 : *std::max_element(out.radii.begin(), out.radii.end());
  return out;
}

SeparationSummary separation_summary(const PointSet& nodes) {
  if (nodes.size() < 2) throw ConfigError("separation needs at least two nodes");
  const KdTree tree(nodes);
  std::vector<double> delta(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) delta[i] = tree.nearest_distance(nodes[i], static_cast<std::uint32_t>(i));
  });
  SeparationSummary s;
  s.min_sep = *std::min_element(delta.begin(), delta.end());
  double sum = 0.0;
  for (double v : delta) sum += v;
  s.mean_nn = sum / static_cast<double>(delta.size());
  return s;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs at least two matching samples");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]) - mx;
    sxy += a * (std::log(y[i]) - my);
    sxx += a * a;
  }
  if (sxx == 0.0) throw NumericError("slope fit needs distinct abscissae");
  return sxy / sxx;
}

namespace {

nlohmann::json to_json(const Summary& s) {
  nlohmann::json j;
  j["count"] = s.count;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["min"] = s.min;
  j["max"] = s.max;
  auto& p = j["percentiles"] = nlohmann::json::object();
  for (std::size_t i = 0; i < kPercentileLevels.size(); ++i)
    p[std::to_string(static_cast<int>(kPercentileLevels[i]))] = s.percentiles[i];
  return j;
}

}  // namespace

std::string summary_json(const Summary& s) { return to_json(s).dump(2); }

std::string stats_json(const NnStats& nn, const RatioStats* ratios) {
  nlohmann::json j;
  j["nodes"] = nn.count;
  j["k"] = nn.k;
  auto& orders = j["nearest"] = nlohmann::json::array();
  for (const auto& s : nn.per_order) orders.push_back(to_json(s));
  j["mean_sep"] = nn.per_order.front().mean;
  j["min_sep"] = nn.per_order.front().min;
  if (nn.k >= 12) j["mean_ratio_12_2"] = nn.mean_ratio_12_2;
  if (nn.k >= 4) j["mean_ratio_4_1"] = nn.mean_ratio_4_1;
  if (ratios) {
    auto r = to_json(ratios->summary);
    r["outliers"] = ratios->outliers.size();
    j["ratio"] = r;
  }
  return j.dump(2);
}

void write_distances_csv(const NnStats& nn, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open " + path + " for writing");
  for (std::size_t j = 1; j <= nn.k; ++j) std::fprintf(f, j > 1 ? ",d%zu" : "d%zu", j);
  std::fprintf(f, "\n");
  for (std::size_t i = 0; i < nn.count; ++i) {
    for (std::size_t j = 1; j <= nn.k; ++j) std::fprintf(f, j > 1 ? ",%.17g" : "%.17g", nn.at(i, j));
    std::fprintf(f, "\n");
  }
  if (std::fclose(f) != 0) throw IoError("write failed for " + path);
}

void write_holes_csv(const HoleEstimate& holes, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open " + path + " for writing");
  std::fprintf(f, "radius\n");
  for (double r : holes.radii) std::fprintf(f, "%.17g\n", r);
  if (std::fclose(f) != 0) throw IoError("write failed for " + path);
}

}  // namespace nodegen
