#include "nodegen/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nodegen/rng.hpp"
#include "nodegen/spatial_index.hpp"

namespace nodegen {

void RadialDensity::gradient_at(ConstPoint x, MutPoint out) const {
  if (gradient) {
    gradient(x, out);
    return;
  }
  const double step = 1e-4 * eval(x);
  Vec probe(x.begin(), x.end());
  for (std::size_t k = 0; k < x.size(); ++k) {
    probe[k] = x[k] + step;
    const double up = eval(probe);
    probe[k] = x[k] - step;
    const double down = eval(probe);
    probe[k] = x[k];
    out[k] = (up - down) / (2.0 * step);
  }
}

RadialDensity constant_density(double value) {
  if (!(value > 0.0)) throw ConfigError("constant density must be positive");
  RadialDensity rho;
  rho.eval = [value](ConstPoint) { return value; };
  rho.lipschitz_bound = 0.0;
  rho.gradient = [](ConstPoint, MutPoint g) { std::fill(g.begin(), g.end(), 0.0); };
  return rho;
}

RadialDensity scaled_density(RadialDensity rho, double factor) {
  if (!(factor > 0.0)) throw ConfigError("density scale factor must be positive");
  RadialDensity out;
  out.lipschitz_bound = rho.lipschitz_bound * factor;
  out.eval = [eval = rho.eval, factor](ConstPoint x) { return factor * eval(x); };
  if (rho.gradient) {
    out.gradient = [grad = rho.gradient, factor](ConstPoint x, MutPoint g) {
      grad(x, g);
      for (double& v : g) v *= factor;
    };
  }
  return out;
}

double sampled_lipschitz_ratio(const RadialDensity& rho, const Box& box, std::size_t pairs,
                               std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t d = box.dim();
  Vec x(d), y(d);
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      x[k] = rng.uniform(box.lo[k], box.hi[k]);
      y[k] = rng.uniform(box.lo[k], box.hi[k]);
    }
    const double dist = distance(x, y);
    if (dist <= 0.0) continue;
    worst = std::max(worst, std::abs(rho(x) - rho(y)) / dist);
  }
  return worst;
}

Domain cube_domain(const Box& box) {
  Domain dom;
  dom.dim = box.dim();
  dom.bounding_box = box;
  dom.inside = [](ConstPoint) { return true; };
  return dom;
}

Domain ball_domain(ConstPoint center, double radius, bool with_pullback) {
  if (!(radius > 0.0)) throw ConfigError("ball radius must be positive");
  Domain dom;
  dom.dim = center.size();
  Vec c(center.begin(), center.end());
  dom.bounding_box.lo = c;
  dom.bounding_box.hi = c;
  for (std::size_t k = 0; k < dom.dim; ++k) {
    dom.bounding_box.lo[k] -= radius;
    dom.bounding_box.hi[k] += radius;
  }
  const double r2 = radius * radius;
  dom.inside = [c, r2](ConstPoint x) { return squared_distance(x, c) < r2; };
  if (with_pullback) {
    dom.pullback = [c, radius](ConstPoint x, MutPoint out) {
      const double r = distance(x, c);
      const double target = radius * (1.0 - 1e-12);
      for (std::size_t k = 0; k < c.size(); ++k)
        out[k] = r > 0.0 ? c[k] + (x[k] - c[k]) * (target / r) : c[k];
    };
  }
  return dom;
}

Domain shell_domain(ConstPoint center, double inner, double outer) {
  if (!(inner >= 0.0 && outer > inner)) throw ConfigError("shell radii must satisfy 0 <= inner < outer");
  Domain dom = ball_domain(center, outer);
  Vec c(center.begin(), center.end());
  const double lo2 = inner * inner;
  const double hi2 = outer * outer;
  dom.inside = [c, lo2, hi2](ConstPoint x) {
    const double r2 = squared_distance(x, c);
    return r2 > lo2 && r2 < hi2;
  };
  return dom;
}

UnitFrame::UnitFrame(const Box& box) {
  const std::size_t d = box.dim();
  side_ = 0.0;
  for (std::size_t k = 0; k < d; ++k) side_ = std::max(side_, box.hi[k] - box.lo[k]);
  if (!(side_ > 0.0)) throw ConfigError("UnitFrame: degenerate bounding box");
  origin_.resize(d);
  for (std::size_t k = 0; k < d; ++k) origin_[k] = 0.5 * (box.lo[k] + box.hi[k]) - 0.5 * side_;
}

void UnitFrame::to_unit(ConstPoint x, MutPoint u) const {
  for (std::size_t k = 0; k < origin_.size(); ++k) u[k] = (x[k] - origin_[k]) / side_;
}

void UnitFrame::from_unit(ConstPoint u, MutPoint x) const {
  for (std::size_t k = 0; k < origin_.size(); ++k) x[k] = origin_[k] + side_ * u[k];
}

PointSet UnitFrame::to_unit(const PointSet& points) const {
  PointSet out(points.dim(), points.size());
  for (std::size_t i = 0; i < points.size(); ++i) to_unit(points[i], out[i]);
  return out;
}

PointSet UnitFrame::from_unit(const PointSet& points) const {
  PointSet out(points.dim(), points.size());
  for (std::size_t i = 0; i < points.size(); ++i) from_unit(points[i], out[i]);
  return out;
}

Domain UnitFrame::to_unit(const Domain& domain) const {
  Domain out;
  out.dim = domain.dim;
  out.bounding_box = Box::unit(domain.dim);
  const UnitFrame frame = *this;
  out.inside = [frame, domain](ConstPoint u) {
    Vec x(u.size());
    frame.from_unit(u, x);
    return domain.contains(x);
  };
  if (domain.pullback) {
    out.pullback = [frame, domain](ConstPoint u, MutPoint v) {
      Vec x(u.size()), y(u.size());
      frame.from_unit(u, x);
      domain.pullback(x, y);
      frame.to_unit(y, v);
    };
  }
  return out;
}

RadialDensity UnitFrame::to_unit(const RadialDensity& rho) const {
  RadialDensity out;
  out.lipschitz_bound = rho.lipschitz_bound;
  const UnitFrame frame = *this;
  out.eval = [frame, eval = rho.eval](ConstPoint u) {
    Vec x(u.size());
    frame.from_unit(u, x);
    return eval(x) / frame.side();
  };
  if (rho.gradient) {
    out.gradient = [frame, grad = rho.gradient](ConstPoint u, MutPoint g) {
      Vec x(u.size());
      frame.from_unit(u, x);
      grad(x, g);
    };
  }
  return out;
}

FixedPointCloud random_point_cloud(std::size_t count, const Box& box, std::uint64_t seed,
                                   double scale_divisor) {
  FixedPointCloud cloud;
  cloud.scale_divisor = scale_divisor;
  cloud.points = PointSet(box.dim());
  Rng rng(seed);
  Vec p(box.dim());
  while (cloud.points.size() < count) {
    for (std::size_t k = 0; k < box.dim(); ++k) p[k] = rng.uniform(box.lo[k], box.hi[k]);
    bool distinct = true;
    for (std::size_t i = 0; i < cloud.points.size() && distinct; ++i)
      distinct = squared_distance(cloud.points[i], p) > 0.0;
    if (distinct) cloud.points.push_back(p);
  }
  return cloud;
}

double point_cloud_density(const FixedPointCloud& cloud, ConstPoint x) {
  if (cloud.points.size() < 2) throw ConfigError("point cloud density needs at least 2 points");
  double d1 = std::numeric_limits<double>::infinity();
  double d2 = d1;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const double s = squared_distance(cloud.points[i], x);
    if (s < d1) {
      d2 = d1;
      d1 = s;
    } else if (s < d2) {
      d2 = s;
    }
  }
  return (std::sqrt(d1) + std::sqrt(d2)) / cloud.scale_divisor;
}

RadialDensity make_point_cloud_density(FixedPointCloud cloud) {
  if (cloud.points.size() < 2) throw ConfigError("point cloud density needs at least 2 points");
  RadialDensity rho;
  rho.lipschitz_bound = 2.0 / cloud.scale_divisor;
  rho.eval = [cloud = std::move(cloud)](ConstPoint x) { return point_cloud_density(cloud, x); };
  return rho;
}

double shell_transform(double r, double r_inner, double h, double c) {
  if (!(h > 0.0)) throw ConfigError("shell transform: h must be positive");
  if (!(c > 0.0)) throw ConfigError("shell transform: C must be positive");
  return std::exp(c * (r - r_inner) / h);
}

double shell_inverse_transform(double r_hat, double r_inner, double h, double c) {
  if (!(h > 0.0) || !(c > 0.0)) throw ConfigError("shell transform: h and C must be positive");
  if (!(r_hat > 0.0)) throw DomainError("shell inverse transform: r_hat must be positive");
  return r_inner + h * std::log(r_hat) / c;
}

double shell_density(ConstPoint x, double c) {
  const double r = norm(x);
  if (!(r > 0.0)) throw DomainError("shell density is undefined at the origin");
  return c * r;
}

RadialDensity make_shell_density(double c, ConstPoint center) {
  if (!(c > 0.0)) throw ConfigError("shell density constant must be positive");
  RadialDensity rho;
  rho.lipschitz_bound = c;
  Vec o(center.begin(), center.end());
  rho.eval = [c, o](ConstPoint x) {
    Vec rel(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) rel[k] = x[k] - o[k];
    return shell_density(rel, c);
  };
  rho.gradient = [c, o](ConstPoint x, MutPoint g) {
    const double r = distance(x, o);
    if (!(r > 0.0)) throw DomainError("shell density gradient is undefined at the origin");
    for (std::size_t k = 0; k < x.size(); ++k) g[k] = c * (x[k] - o[k]) / r;
  };
  return rho;
}

PointSet sphere_nodes(std::size_t count, ConstPoint center, double radius,
                      std::size_t relax_iterations) {
  if (center.size() != 3) throw ConfigError("sphere_nodes supports d = 3 only");
  if (!(radius > 0.0)) throw ConfigError("sphere radius must be positive");
  PointSet unit(3, count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    unit[i][0] = rxy * std::cos(phi);
    unit[i][1] = rxy * std::sin(phi);
    unit[i][2] = z;
  }

  // Projected truncated Riesz sweeps (s = 4 > 2) with the node_update schedule.
  const std::size_t k_nn = std::min<std::size_t>(12, count > 0 ? count - 1 : 0);
  const double s = 4.0;
  const double offset = 10.0;
  std::vector<std::uint32_t> idx;
  std::vector<double> d2;
  for (std::size_t t = 0; t < relax_iterations && k_nn > 0; ++t) {
    const KdTree tree(unit);
    PointSet next = unit;
    for (std::size_t i = 0; i < count; ++i) {
      tree.knn_into(unit[i], k_nn, static_cast<std::uint32_t>(i), idx, d2);
      Vec g(3, 0.0);
      for (std::size_t j = 0; j < idx.size(); ++j) {
        const double w = std::pow(d2[j], -(s + 2.0) / 2.0);
        for (int a = 0; a < 3; ++a) g[a] += w * (unit[i][a] - unit[idx[j]][a]);
      }
      // Remove the radial component.
      double radial = 0.0;
      for (int a = 0; a < 3; ++a) radial += g[a] * unit[i][a];
      for (int a = 0; a < 3; ++a) g[a] -= radial * unit[i][a];
      const double gn = norm(g);
      if (gn < 1e-30) continue;
      const double step = std::sqrt(d2.front()) / (static_cast<double>(t) + offset);
      Vec p(3);
      for (int a = 0; a < 3; ++a) p[a] = unit[i][a] + step * g[a] / gn;
      const double pn = norm(p);
      for (int a = 0; a < 3; ++a) next[i][a] = p[a] / pn;
    }
    unit = std::move(next);
  }

  PointSet out(3, count);
  for (std::size_t i = 0; i < count; ++i)
    for (int a = 0; a < 3; ++a) out[i][a] = center[a] + radius * unit[i][a];
  return out;
}

}  // namespace nodegen
