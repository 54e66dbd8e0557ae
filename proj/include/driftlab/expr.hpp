#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace driftlab {

/// Base class for all driftlab exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse failure. `offset` is the 0-based byte position in the source text.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : Error(msg + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation left the expression's real domain (log of a nonpositive
/// value, division by zero, negative sqrt argument, 0^negative).
class EvalDomainError : public Error {
 public:
  using Error::Error;
};

enum class Var : int { x = 0, y = 1 };

/// Immutable scalar expression in the spatial variables {x, y}.
///
/// Nodes are shared and never mutated after construction, so Expr values
/// can be copied and evaluated concurrently. Factory functions fold
/// constant subexpressions eagerly; no other simplification happens.
class Expr {
 public:
  enum class Func : int { sin, cos, exp, log, sqrt };

  Expr();  // the literal 0
  static Expr literal(double v);
  static Expr variable(Var v);
  static Expr apply(Func f, const Expr& arg);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr operator-() const;
  Expr pow(int exponent) const;

  double eval(double x, double y) const;
  Expr diff(Var v) const;

  /// Infix form that parses back to an equivalent expression.
  std::string str() const;

  bool is_literal() const;
  bool is_literal(double& value) const;
  bool is_zero() const;

  /// Structural identity (AST sharing), used by TensorField's symmetry
  /// invariant.
  const void* node_id() const { return node_.get(); }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Parse an infix expression over {x, y}; see docs/grammar.md for the EBNF.
Expr parse(std::string_view src);

/// The spec-level operation names; thin wrappers over the member functions.
double eval_at(const Expr& e, double x, double y);
Expr differentiate(const Expr& e, Var v);

}  // namespace driftlab
