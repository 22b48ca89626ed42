#include "nodegen/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace nodegen {

struct Expression::Node {
  enum class Kind { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
  double value = 0.0;
  std::size_t variable = 0;
  std::string function;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(ConstPoint x) const {
    switch (kind) {
      case Kind::Number: return value;
      case Kind::Variable:
        if (variable >= x.size()) throw InputError("expression variable exceeds the dimension");
        return x[variable];
      case Kind::Neg: return -args[0]->eval(x);
      case Kind::Add: return args[0]->eval(x) + args[1]->eval(x);
      case Kind::Sub: return args[0]->eval(x) - args[1]->eval(x);
      case Kind::Mul: return args[0]->eval(x) * args[1]->eval(x);
      case Kind::Div: return args[0]->eval(x) / args[1]->eval(x);
      case Kind::Pow: return std::pow(args[0]->eval(x), args[1]->eval(x));
      case Kind::Call: {
        const double a = args[0]->eval(x);
        if (function == "sqrt") return std::sqrt(a);
        if (function == "exp") return std::exp(a);
        if (function == "log") return std::log(a);
        if (function == "abs") return std::abs(a);
        if (function == "sin") return std::sin(a);
        if (function == "cos") return std::cos(a);
        if (function == "tanh") return std::tanh(a);
        const double b = args[1]->eval(x);
        if (function == "min") return std::min(a, b);
        if (function == "max") return std::max(a, b);
        return std::pow(a, b);
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, std::vector<NodePtr> args = {}) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : src_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("expression: " + msg, pos_); }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Kind::Add, {lhs, term()});
      else if (accept('-'))
        lhs = make(Kind::Sub, {lhs, term()});
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Kind::Mul, {lhs, unary()});
      else if (accept('/'))
        lhs = make(Kind::Div, {lhs, unary()});
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::Pow, {base, unary()});  // right associative
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Number;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      const std::string name = src_.substr(start, pos_ - start);
      if (accept('(')) return call(name);
      auto n = std::make_shared<Expression::Node>();
      if (name == "pi") {
        n->kind = Kind::Number;
        n->value = std::numbers::pi;
        return n;
      }
      n->kind = Kind::Variable;
      if (name == "x") {
        n->variable = 0;
      } else if (name == "y") {
        n->variable = 1;
      } else if (name == "z") {
        n->variable = 2;
      } else if (name.size() > 1 && name[0] == 'x' &&
                 name.find_first_not_of("0123456789", 1) == std::string::npos) {
        const long idx = std::strtol(name.c_str() + 1, nullptr, 10);
        if (idx < 1) fail("variables are numbered from x1");
        n->variable = static_cast<std::size_t>(idx - 1);
      } else {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      return n;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr call(const std::string& name) {
    static const std::vector<std::string> unary_fns = {"sqrt", "exp", "log", "abs", "sin", "cos", "tanh"};
    static const std::vector<std::string> binary_fns = {"min", "max", "pow"};
    std::size_t arity = 0;
    for (const auto& f : unary_fns)
      if (f == name) arity = 1;
    for (const auto& f : binary_fns)
      if (f == name) arity = 2;
    if (arity == 0) fail("unknown function '" + name + "'");
    std::vector<NodePtr> args{expr()};
    if (arity == 2) {
      if (!accept(',')) fail("expected ','");
      args.push_back(expr());
    }
    if (!accept(')')) fail("expected ')'");
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Call;
    n->function = name;
    n->args = std::move(args);
    return n;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& source) : source_(source), root_(Parser(source).parse()) {}
Expression::~Expression() = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;

double Expression::operator()(ConstPoint x) const { return root_->eval(x); }

RadialDensity make_expression_density(const std::string& source, double lipschitz_bound) {
  Expression e(source);
  RadialDensity rho;
  rho.lipschitz_bound = lipschitz_bound;
  rho.eval = [e](ConstPoint x) {
    const double v = e(x);
    if (!(v > 0.0)) throw DomainError("density expression is not positive at a query point");
    return v;
  };
  return rho;
}

}  // namespace nodegen
