#pragma once

#include <memory>
#include <string>

#include "nodegen/domain.hpp"

namespace nodegen {

/// Compiled arithmetic expression over coordinates x, y, z (or x1..xd).
/// Supports + - * / ^, parentheses, numeric literals, pi, and the functions
/// sqrt exp log abs sin cos tanh min max pow.
class Expression {
 public:
  explicit Expression(const std::string& source);
  ~Expression();
  Expression(const Expression&);
  Expression& operator=(const Expression&);

  double operator()(ConstPoint x) const;
  const std::string& source() const noexcept { return source_; }

  struct Node;

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

/// Density from a user expression; gradient falls back to finite differences.
RadialDensity make_expression_density(const std::string& source, double lipschitz_bound);

}  // namespace nodegen
