#pragma once

/**
 * @file expr.hpp
 * @brief Scalar expressions: recursive-descent parser, AST, generic evaluator.
 *
 * Grammar:
 *   expr   := term (('+' | '-') term)*
 *   term   := unary (('*' | '/') unary)*
 *   unary  := '-' unary | power
 *   power  := atom ('^' unary)?
 *   atom   := number | ident | func '(' expr ')' | '(' expr ')'
 *   func   := exp | sin | cos | log | sqrt
 *
 * '^' binds tighter than unary minus (-x1^2 == -(x1^2)) and is
 * right-associative. Identifiers are x1..xd, plus u1..ud when parsing fields
 * on the tangent bundle (u_i maps to variable d + i - 1).
 */

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tmlift/field.hpp"

namespace tmlift {

enum class ExprKind { constant, variable, neg, exp, sin, cos, log, sqrt, add, sub, mul, div, pow };

enum class VarScheme { base, tangent_bundle };

class ParseError : public std::runtime_error {
 public:
  enum class Kind { syntax, unknown_identifier };

  ParseError(Kind kind, std::size_t position, std::string detail, std::string identifier = {})
      : std::runtime_error(format(kind, position, detail, identifier)),
        kind_(kind),
        position_(position),
        identifier_(std::move(identifier)) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }
  const std::string& identifier() const noexcept { return identifier_; }

 private:
  static std::string format(Kind kind, std::size_t pos, const std::string& detail,
                            const std::string& ident) {
    if (kind == Kind::unknown_identifier)
      return "unknown identifier '" + ident + "' at position " + std::to_string(pos) +
             (detail.empty() ? "" : " (" + detail + ")");
    return "syntax error at position " + std::to_string(pos) + ": " + detail;
  }

  Kind kind_;
  std::size_t position_;
  std::string identifier_;
};

/// Raised when evaluation leaves a primitive's domain.
class EvaluationDomainError : public std::runtime_error {
 public:
  EvaluationDomainError(const std::string& what, std::string subexpression)
      : std::runtime_error(what + " in '" + subexpression + "'"),
        subexpression_(std::move(subexpression)) {}

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

struct ExprNode {
  ExprKind kind;
  double value = 0.0;     // constant
  std::size_t index = 0;  // variable
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

using ExprPtr = std::shared_ptr<const ExprNode>;

namespace detail {

inline bool is_unary(ExprKind k) {
  return k == ExprKind::neg || k == ExprKind::exp || k == ExprKind::sin || k == ExprKind::cos ||
         k == ExprKind::log || k == ExprKind::sqrt;
}

inline const char* function_name(ExprKind k) {
  switch (k) {
    case ExprKind::exp: return "exp";
    case ExprKind::sin: return "sin";
    case ExprKind::cos: return "cos";
    case ExprKind::log: return "log";
    case ExprKind::sqrt: return "sqrt";
    default: return "";
  }
}

inline char operator_symbol(ExprKind k) {
  switch (k) {
    case ExprKind::add: return '+';
    case ExprKind::sub: return '-';
    case ExprKind::mul: return '*';
    case ExprKind::div: return '/';
    case ExprKind::pow: return '^';
    default: return '?';
  }
}

inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline std::string variable_name(std::size_t index, std::size_t base_dim, VarScheme vars) {
  if (vars == VarScheme::tangent_bundle && index >= base_dim)
    return "u" + std::to_string(index - base_dim + 1);
  return "x" + std::to_string(index + 1);
}

inline void print(const ExprNode& n, std::size_t base_dim, VarScheme vars, std::string& out) {
  switch (n.kind) {
    case ExprKind::constant:
      if (n.value < 0.0 || std::signbit(n.value)) {
        out += "(-" + format_number(-n.value) + ")";
      } else {
        out += format_number(n.value);
      }
      return;
    case ExprKind::variable: out += variable_name(n.index, base_dim, vars); return;
    case ExprKind::neg:
      out += "(-";
      print(*n.lhs, base_dim, vars, out);
      out += ")";
      return;
    default: break;
  }
  if (is_unary(n.kind)) {
    out += function_name(n.kind);
    out += "(";
    print(*n.lhs, base_dim, vars, out);
    out += ")";
    return;
  }
  out += "(";
  print(*n.lhs, base_dim, vars, out);
  out += ' ';
  out += operator_symbol(n.kind);
  out += ' ';
  print(*n.rhs, base_dim, vars, out);
  out += ")";
}

}  // namespace detail

/// Parsed expression over a fixed number of variables.
class Expr {
 public:
  Expr(ExprPtr root, std::size_t base_dim, VarScheme vars)
      : root_(std::move(root)), base_dim_(base_dim), vars_(vars) {}

  const ExprNode& root() const noexcept { return *root_; }
  const ExprPtr& root_ptr() const noexcept { return root_; }
  std::size_t base_dim() const noexcept { return base_dim_; }
  VarScheme vars() const noexcept { return vars_; }
  /// Number of variables the expression is evaluated over.
  std::size_t dim() const noexcept {
    return vars_ == VarScheme::tangent_bundle ? 2 * base_dim_ : base_dim_;
  }

  std::string to_string() const { return subexpression_text(*root_); }

  std::string subexpression_text(const ExprNode& n) const {
    std::string out;
    detail::print(n, base_dim_, vars_, out);
    return out;
  }

 private:
  ExprPtr root_;
  std::size_t base_dim_;
  VarScheme vars_;
};

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, std::size_t dim, VarScheme vars)
      : text_(text), dim_(dim), vars_(vars) {}

  ExprPtr parse() {
    auto e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  static ExprPtr make(ExprKind k, ExprPtr lhs, ExprPtr rhs = nullptr) {
    return std::make_shared<const ExprNode>(ExprNode{k, 0.0, 0, std::move(lhs), std::move(rhs)});
  }

  [[noreturn]] void fail(const std::string& detail) const {
    throw ParseError(ParseError::Kind::syntax, pos_, pos_ >= text_.size() ? "unexpected end of input" : detail);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(ExprKind::add, lhs, term());
      } else if (accept('-')) {
        lhs = make(ExprKind::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(ExprKind::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(ExprKind::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr unary() {
    if (accept('-')) return make(ExprKind::neg, unary());
    return power();
  }

  ExprPtr power() {
    auto base = atom();
    if (accept('^')) return make(ExprKind::pow, base, unary());
    return base;
  }

  ExprPtr atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  ExprPtr number() {
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return std::make_shared<const ExprNode>(ExprNode{ExprKind::constant, v, 0, nullptr, nullptr});
  }

  ExprPtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));

    static constexpr std::pair<const char*, ExprKind> kFunctions[] = {
        {"exp", ExprKind::exp}, {"sin", ExprKind::sin},   {"cos", ExprKind::cos},
        {"log", ExprKind::log}, {"sqrt", ExprKind::sqrt},
    };
    for (const auto& [fname, kind] : kFunctions) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after " + name);
        auto arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(kind, arg);
      }
    }

    const char prefix = name[0];
    const bool tm = vars_ == VarScheme::tangent_bundle;
    if ((prefix == 'x' || (prefix == 'u' && tm)) && name.size() > 1 && name[1] != '0' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      std::size_t k = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), k);
      if (k >= 1 && k <= dim_) {
        const std::size_t index = (prefix == 'u' ? dim_ : 0) + (k - 1);
        return std::make_shared<const ExprNode>(ExprNode{ExprKind::variable, 0.0, index, nullptr, nullptr});
      }
      throw ParseError(ParseError::Kind::unknown_identifier, start,
                       "index exceeds dimension " + std::to_string(dim_), name);
    }
    throw ParseError(ParseError::Kind::unknown_identifier, start, "", name);
  }

  std::string_view text_;
  std::size_t dim_;
  VarScheme vars_;
  std::size_t pos_ = 0;
};

template <class T>
T eval_node(const Expr& e, const ExprNode& n, std::span<const T> x) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sqrt;
  auto domain = [&](const char* what) -> EvaluationDomainError {
    return EvaluationDomainError(what, e.subexpression_text(n));
  };
  switch (n.kind) {
    case ExprKind::constant: return T(n.value);
    case ExprKind::variable: return x[n.index];
    case ExprKind::neg: return -eval_node(e, *n.lhs, x);
    case ExprKind::exp: return exp(eval_node(e, *n.lhs, x));
    case ExprKind::sin: return sin(eval_node(e, *n.lhs, x));
    case ExprKind::cos: return cos(eval_node(e, *n.lhs, x));
    case ExprKind::log: {
      T a = eval_node(e, *n.lhs, x);
      if (!(value_of(a) > 0.0)) throw domain("log of non-positive value");
      return log(a);
    }
    case ExprKind::sqrt: {
      T a = eval_node(e, *n.lhs, x);
      if (!(value_of(a) >= 0.0)) throw domain("sqrt of negative value");
      return sqrt(a);
    }
    case ExprKind::add: return eval_node(e, *n.lhs, x) + eval_node(e, *n.rhs, x);
    case ExprKind::sub: return eval_node(e, *n.lhs, x) - eval_node(e, *n.rhs, x);
    case ExprKind::mul: return eval_node(e, *n.lhs, x) * eval_node(e, *n.rhs, x);
    case ExprKind::div: {
      T a = eval_node(e, *n.lhs, x);
      T b = eval_node(e, *n.rhs, x);
      if (value_of(b) == 0.0) throw domain("division by zero");
      return a / b;
    }
    case ExprKind::pow: {
      T a = eval_node(e, *n.lhs, x);
      T b = eval_node(e, *n.rhs, x);
      const double av = value_of(a);
      const double bv = value_of(b);
      if (av < 0.0 && bv != std::floor(bv)) throw domain("negative base with non-integer exponent");
      if (av == 0.0 && bv < 0.0) throw domain("zero base with negative exponent");
      return pow(a, b);
    }
  }
  throw std::logic_error("unhandled expression node");
}

inline bool structurally_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::constant: return a.value == b.value;
    case ExprKind::variable: return a.index == b.index;
    default: break;
  }
  if (is_unary(a.kind)) return structurally_equal(*a.lhs, *b.lhs);
  return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
}

}  // namespace detail

/// Parses `text` over base dimension `dim`.
inline Expr parse(std::string_view text, std::size_t dim, VarScheme vars = VarScheme::base) {
  if (dim == 0) throw std::invalid_argument("parse: dimension must be positive");
  detail::Parser p(text, dim, vars);
  return Expr(p.parse(), dim, vars);
}

/// Evaluates e at x; x.size() must equal e.dim().
template <Carrier T>
T eval(const Expr& e, std::span<const T> x) {
  require_dim(x.size(), e.dim(), "eval");
  return detail::eval_node(e, e.root(), x);
}

template <Carrier T>
T eval(const Expr& e, const std::vector<T>& x) {
  return eval(e, std::span<const T>(x));
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
  return a.dim() == b.dim() && detail::structurally_equal(a.root(), b.root());
}

inline ScalarField to_field(const Expr& e) {
  return {e.dim(), [e]<class T>(std::span<const T> x) -> T { return detail::eval_node(e, e.root(), x); }};
}

/// Convenience: parse then wrap as a field.
inline ScalarField parse_field(std::string_view text, std::size_t dim,
                               VarScheme vars = VarScheme::base) {
  return to_field(parse(text, dim, vars));
}

}  // namespace tmlift
