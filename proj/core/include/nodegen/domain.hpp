#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "nodegen/point_set.hpp"

namespace nodegen {

/// Target nearest-neighbor distance as a function of position.
struct RadialDensity {
  std::function<double(ConstPoint)> eval;
  double lipschitz_bound = 1.0;
  /// Optional analytic gradient; empty means central differences.
  std::function<void(ConstPoint, MutPoint)> gradient;

  double operator()(ConstPoint x) const { return eval(x); }
  bool has_analytic_gradient() const { return static_cast<bool>(gradient); }

  /// Analytic gradient when available, otherwise central differences with
  /// step 1e-4 * rho(x).
  void gradient_at(ConstPoint x, MutPoint out) const;
};

RadialDensity constant_density(double value);

/// rho scaled by a positive factor (Lipschitz bound and gradient scale too).
RadialDensity scaled_density(RadialDensity rho, double factor);

/// Largest |rho(x)-rho(y)|/|x-y| over `pairs` random pairs drawn in `box`.
double sampled_lipschitz_ratio(const RadialDensity& rho, const Box& box, std::size_t pairs,
                               std::uint64_t seed);

/// Distribution support Omega with its point inclusion function.
struct Domain {
  std::function<bool(ConstPoint)> inside;
  Box bounding_box;
  /// Optional map from a neighborhood of Omega onto its boundary.
  std::function<void(ConstPoint, MutPoint)> pullback;
  std::size_t dim = 3;

  /// False outside the bounding box regardless of `inside`.
  bool contains(ConstPoint x) const { return bounding_box.contains(x) && inside(x); }
  bool has_pullback() const { return static_cast<bool>(pullback); }
};

Domain cube_domain(const Box& box);
Domain ball_domain(ConstPoint center, double radius, bool with_pullback = false);
/// Open spherical shell inner < |x - center| < outer.
Domain shell_domain(ConstPoint center, double inner, double outer);

/// Isotropic scale+translate map from a box onto the unit cube. The box is
/// centered inside a cube whose side is its largest extent.
class UnitFrame {
 public:
  explicit UnitFrame(const Box& box);

  std::size_t dim() const noexcept { return origin_.size(); }
  double side() const noexcept { return side_; }
  const Vec& origin() const noexcept { return origin_; }

  void to_unit(ConstPoint x, MutPoint u) const;
  void from_unit(ConstPoint u, MutPoint x) const;
  PointSet to_unit(const PointSet& points) const;
  PointSet from_unit(const PointSet& points) const;

  Domain to_unit(const Domain& domain) const;
  /// Lengths shrink by 1/side, so rho does as well; the Lipschitz bound is unchanged.
  RadialDensity to_unit(const RadialDensity& rho) const;

 private:
  Vec origin_;
  double side_ = 1.0;
};

/// The fixed point set P of the point-cloud example.
struct FixedPointCloud {
  PointSet points;
  double scale_divisor = 20.0;
};

FixedPointCloud random_point_cloud(std::size_t count, const Box& box, std::uint64_t seed,
                                   double scale_divisor = 20.0);

/// (d1 + d2) / scale_divisor with d1, d2 the distances to the two nearest cloud points.
double point_cloud_density(const FixedPointCloud& cloud, ConstPoint x);
RadialDensity make_point_cloud_density(FixedPointCloud cloud);

/// Radial change of variables exp(C (r - r_inner) / h) making a shell with
/// vertical gap h and tangential gap C r isotropic.
double shell_transform(double r, double r_inner, double h, double c);
double shell_inverse_transform(double r_hat, double r_inner, double h, double c);

/// C * |x|; throws DomainError at the origin.
double shell_density(ConstPoint x, double c);
RadialDensity make_shell_density(double c, ConstPoint center);

/// Quasi-uniform nodes on a sphere: Fibonacci spiral relaxed by a few
/// projected Riesz repulsion sweeps.
PointSet sphere_nodes(std::size_t count, ConstPoint center, double radius,
                      std::size_t relax_iterations = 60);

}  // namespace nodegen
