#pragma once

// Closed-form arithmetic expressions over x, y, u, v.
//
// Grammar, lowest to highest precedence:
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | variable | name '(' sum (',' sum)* ')' | '(' sum ')'

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace psys::expr {

enum class Var : std::uint8_t { x = 0, y = 1, u = 2, v = 3 };
enum class BinaryOp : std::uint8_t { add, sub, mul, div, pow };
enum class Func : std::uint8_t { abs, sgn, min, max, sin, cos, exp, log, pow, odd_pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number {
  double value;
};
struct Variable {
  Var var;
};
struct Negate {
  NodePtr operand;
};
struct Binary {
  BinaryOp op;
  NodePtr lhs;
  NodePtr rhs;
};
struct Call {
  Func fn;
  std::vector<NodePtr> args;
};

struct Node {
  std::variant<Number, Variable, Negate, Binary, Call> content;
};

std::string_view name_of(Var v);
std::string_view name_of(Func f);
int arity_of(Func f);

/// Values for the four variables; unset variables are unbound.
class Bindings {
 public:
  Bindings() = default;
  static Bindings at(double x, double y, double u, double v);

  Bindings& set(Var var, double value);
  std::optional<double> get(Var var) const;

 private:
  std::array<double, 4> values_{};
  std::uint8_t mask_ = 0;
};

/// Immutable parsed expression. Copies share the tree.
class Expr {
 public:
  static Expr parse(std::string_view text);
  static Expr constant(double value);
  explicit Expr(NodePtr root);

  /// Throws EvaluationError for unbound variables and for any operation
  /// whose result would not be a finite real.
  double evaluate(const Bindings& bindings) const;

  /// Fully parenthesized text that parses back to the same tree.
  std::string to_string() const;

  bool uses(Var var) const;
  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }

 private:
  NodePtr root_;
};

inline Expr parse(std::string_view text) { return Expr::parse(text); }
inline double evaluate(const Expr& e, const Bindings& b) { return e.evaluate(b); }

bool structurally_equal(const Node& a, const Node& b);
inline bool structurally_equal(const Expr& a, const Expr& b) {
  return structurally_equal(a.root(), b.root());
}

/// sgn(t)·|t|^e, the odd extension of the power map.
double odd_pow(double t, double e);

}  // namespace psys::expr
