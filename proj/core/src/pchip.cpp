#include "nodegen/pchip.hpp"

#include <algorithm>
#include <cmath>

#include "nodegen/error.hpp"

namespace nodegen {

namespace {

double end_slope(double h0, double h1, double del0, double del1) {
  double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
  if ((d > 0.0) != (del0 > 0.0) || d == 0.0 || del0 == 0.0) return 0.0;
  if ((del0 > 0.0) != (del1 > 0.0) && std::abs(d) > std::abs(3.0 * del0)) d = 3.0 * del0;
  return d;
}

}  // namespace

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n == 0 || n != y_.size()) throw ConfigError("pchip: knot and value counts differ or are empty");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw ConfigError("pchip: knots must be strictly increasing");
  slope_.assign(n, 0.0);
  if (n == 1) return;
  std::vector<double> h(n - 1), del(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    del[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  if (n == 2) {
    slope_[0] = slope_[1] = del[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double a = del[k - 1];
    const double b = del[k];
    if (a == 0.0 || b == 0.0 || (a > 0.0) != (b > 0.0)) {
      slope_[k] = 0.0;
    } else {
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      slope_[k] = (w1 + w2) / (w1 / a + w2 / b);
    }
  }
  slope_[0] = end_slope(h[0], h[1], del[0], del[1]);
  slope_[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
}

double Pchip::operator()(double x) const {
  const std::size_t n = x_.size();
  if (n == 1 || x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
}

}  // namespace nodegen
