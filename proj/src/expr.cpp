#include "psys/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "psys/error.hpp"

namespace psys::expr {

namespace {

constexpr std::array<std::string_view, 4> kVarNames = {"x", "y", "u", "v"};
constexpr std::array<std::string_view, 10> kFuncNames = {"abs", "sgn", "min", "max", "sin",
                                                         "cos", "exp", "log", "pow", "odd_pow"};

[[noreturn]] void domain_error(const std::string& what) {
  throw EvaluationError(EvaluationError::Kind::domain, "evaluation domain error: " + what);
}

double checked(double value, const char* op) {
  if (!std::isfinite(value)) domain_error(std::string("non-finite result of ") + op);
  return value;
}

double checked_pow(double base, double exponent) {
  if (base < 0.0 && std::nearbyint(exponent) != exponent)
    domain_error("negative base raised to a non-integer power");
  if (base == 0.0 && exponent < 0.0) domain_error("zero raised to a negative power");
  return checked(std::pow(base, exponent), "power");
}

template <class T>
NodePtr make_node(T payload) {
  return std::make_shared<const Node>(Node{std::move(payload)});
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    NodePtr root = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
    return root;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ == text_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Binary{BinaryOp::add, lhs, parse_product()});
      } else if (accept('-')) {
        lhs = make_node(Binary{BinaryOp::sub, lhs, parse_product()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Binary{BinaryOp::mul, lhs, parse_unary()});
      } else if (accept('/')) {
        lhs = make_node(Binary{BinaryOp::div, lhs, parse_unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_node(Negate{parse_unary()});
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) return make_node(Binary{BinaryOp::pow, base, parse_unary()});
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ParseError("malformed exponent", mark);
    }
    double value = 0.0;
    const auto* first = text_.data() + start;
    const auto* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value))
      throw ParseError("number out of range", start);
    return make_node(Number{value});
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    for (std::size_t i = 0; i < kVarNames.size(); ++i)
      if (name == kVarNames[i]) return make_node(Variable{static_cast<Var>(i)});

    for (std::size_t i = 0; i < kFuncNames.size(); ++i) {
      if (name != kFuncNames[i]) continue;
      const auto fn = static_cast<Func>(i);
      expect('(');
      std::vector<NodePtr> args;
      args.push_back(parse_sum());
      while (accept(',')) args.push_back(parse_sum());
      const std::size_t close = pos_;
      expect(')');
      if (static_cast<int>(args.size()) != arity_of(fn))
        throw ParseError(std::string(name) + " expects " + std::to_string(arity_of(fn)) +
                             " argument(s), got " + std::to_string(args.size()),
                         close);
      return make_node(Call{fn, std::move(args)});
    }
    throw UnknownIdentifierError(std::string(name), start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double eval_node(const Node& node, const Bindings& b);

struct Evaluator {
  const Bindings& b;

  double operator()(const Number& n) const { return n.value; }

  double operator()(const Variable& v) const {
    auto value = b.get(v.var);
    if (!value)
      throw EvaluationError(EvaluationError::Kind::unbound_variable,
                            "unbound variable '" + std::string(name_of(v.var)) + "'");
    return *value;
  }

  double operator()(const Negate& n) const { return -eval_node(*n.operand, b); }

  double operator()(const Binary& bin) const {
    const double l = eval_node(*bin.lhs, b);
    const double r = eval_node(*bin.rhs, b);
    switch (bin.op) {
      case BinaryOp::add: return checked(l + r, "+");
      case BinaryOp::sub: return checked(l - r, "-");
      case BinaryOp::mul: return checked(l * r, "*");
      case BinaryOp::div:
        if (r == 0.0) domain_error("division by zero");
        return checked(l / r, "/");
      case BinaryOp::pow: return checked_pow(l, r);
    }
    return 0.0;
  }

  double operator()(const Call& call) const {
    const double a = eval_node(*call.args[0], b);
    const double c = call.args.size() > 1 ? eval_node(*call.args[1], b) : 0.0;
    switch (call.fn) {
      case Func::abs: return std::fabs(a);
      case Func::sgn: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
      case Func::min: return std::fmin(a, c);
      case Func::max: return std::fmax(a, c);
      case Func::sin: return std::sin(a);
      case Func::cos: return std::cos(a);
      case Func::exp: return checked(std::exp(a), "exp");
      case Func::log:
        if (a <= 0.0) domain_error("log of a non-positive number");
        return std::log(a);
      case Func::pow: return checked_pow(a, c);
      case Func::odd_pow: return odd_pow(a, c);
    }
    return 0.0;
  }
};

double eval_node(const Node& node, const Bindings& b) { return std::visit(Evaluator{b}, node.content); }

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_node(const Node& node, std::string& out) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Number>) {
          out += format_number(n.value);
        } else if constexpr (std::is_same_v<T, Variable>) {
          out += name_of(n.var);
        } else if constexpr (std::is_same_v<T, Negate>) {
          out += "(-";
          print_node(*n.operand, out);
          out += ')';
        } else if constexpr (std::is_same_v<T, Binary>) {
          static constexpr char kOps[] = {'+', '-', '*', '/', '^'};
          out += '(';
          print_node(*n.lhs, out);
          out += ' ';
          out += kOps[static_cast<int>(n.op)];
          out += ' ';
          print_node(*n.rhs, out);
          out += ')';
        } else {
          out += name_of(n.fn);
          out += '(';
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ", ";
            print_node(*n.args[i], out);
          }
          out += ')';
        }
      },
      node.content);
}

bool uses_var(const Node& node, Var var) {
  return std::visit(
      [var](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Number>) {
          return false;
        } else if constexpr (std::is_same_v<T, Variable>) {
          return n.var == var;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return uses_var(*n.operand, var);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return uses_var(*n.lhs, var) || uses_var(*n.rhs, var);
        } else {
          for (const auto& a : n.args)
            if (uses_var(*a, var)) return true;
          return false;
        }
      },
      node.content);
}

}  // namespace

std::string_view name_of(Var v) { return kVarNames[static_cast<std::size_t>(v)]; }
std::string_view name_of(Func f) { return kFuncNames[static_cast<std::size_t>(f)]; }

int arity_of(Func f) {
  switch (f) {
    case Func::min:
    case Func::max:
    case Func::pow:
    case Func::odd_pow: return 2;
    default: return 1;
  }
}

double odd_pow(double t, double e) {
  if (t == 0.0) {
    if (e < 0.0) domain_error("odd_pow of zero with a negative exponent");
    return 0.0;
  }
  const double magnitude = checked(std::pow(std::fabs(t), e), "odd_pow");
  return t > 0.0 ? magnitude : -magnitude;
}

Bindings Bindings::at(double x, double y, double u, double v) {
  Bindings b;
  b.values_ = {x, y, u, v};
  b.mask_ = 0x0f;
  return b;
}

Bindings& Bindings::set(Var var, double value) {
  const auto i = static_cast<std::size_t>(var);
  values_[i] = value;
  mask_ = static_cast<std::uint8_t>(mask_ | (1u << i));
  return *this;
}

std::optional<double> Bindings::get(Var var) const {
  const auto i = static_cast<std::size_t>(var);
  if (!(mask_ & (1u << i))) return std::nullopt;
  return values_[i];
}

Expr::Expr(NodePtr root) : root_(std::move(root)) {}

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).parse_all()); }

Expr Expr::constant(double value) { return Expr(make_node(Number{value})); }

double Expr::evaluate(const Bindings& bindings) const { return eval_node(*root_, bindings); }

std::string Expr::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

bool Expr::uses(Var var) const { return uses_var(*root_, var); }

bool structurally_equal(const Node& a, const Node& b) {
  if (a.content.index() != b.content.index()) return false;
  return std::visit(
      [&b](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.content);
        if constexpr (std::is_same_v<T, Number>) {
          return lhs.value == rhs.value;
        } else if constexpr (std::is_same_v<T, Variable>) {
          return lhs.var == rhs.var;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return structurally_equal(*lhs.operand, *rhs.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return lhs.op == rhs.op && structurally_equal(*lhs.lhs, *rhs.lhs) &&
                 structurally_equal(*lhs.rhs, *rhs.rhs);
        } else {
          if (lhs.fn != rhs.fn || lhs.args.size() != rhs.args.size()) return false;
          for (std::size_t i = 0; i < lhs.args.size(); ++i)
            if (!structurally_equal(*lhs.args[i], *rhs.args[i])) return false;
          return true;
        }
      },
      a.content);
}

}  // namespace psys::expr
