#pragma once

#include <vector>

namespace nodegen {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Butland
/// slopes, as in the usual "pchip"). Monotone data give a monotone curve.
class Pchip {
 public:
  Pchip(std::vector<double> x, std::vector<double> y);

  /// Knots must be strictly increasing; outside the knot range the end
  /// values are held constant.
  double operator()(double x) const;

  const std::vector<double>& knots() const noexcept { return x_; }
  const std::vector<double>& values() const noexcept { return y_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slope_;
};

}  // namespace nodegen
