#include "driftlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace driftlab {

struct Expr::Node {
  enum class Kind : int { literal, variable, add, sub, mul, div, pow_int, call };
  Kind kind;
  double value = 0.0;                 // literal
  Var var = Var::x;                   // variable
  int exponent = 0;                   // pow_int
  Func fn = Func::sin;                // call
  std::shared_ptr<const Node> a, b;   // operands
};

namespace {

using Node = Expr::Node;
using Kind = Expr::Node::Kind;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_literal(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::literal;
  n->value = v;
  return n;
}

const NodePtr& zero_node() {
  static const NodePtr z = make_literal(0.0);
  return z;
}

const NodePtr& one_node() {
  static const NodePtr o = make_literal(1.0);
  return o;
}

bool is_lit(const NodePtr& n, double& v) {
  if (n->kind == Kind::literal) {
    v = n->value;
    return true;
  }
  return false;
}

bool is_lit_eq(const NodePtr& n, double v) {
  double w;
  return is_lit(n, w) && w == v;
}

NodePtr make_bin(Kind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

// Constant folding only; folds that could hide a domain error (x/0,
// log(-1), ...) are skipped so the error still surfaces at eval time.
NodePtr fold_add(NodePtr a, NodePtr b) {
  double va, vb;
  if (is_lit(a, va) && is_lit(b, vb)) return make_literal(va + vb);
  if (is_lit_eq(a, 0.0)) return b;
  if (is_lit_eq(b, 0.0)) return a;
  return make_bin(Kind::add, std::move(a), std::move(b));
}

NodePtr fold_sub(NodePtr a, NodePtr b) {
  double va, vb;
  if (is_lit(a, va) && is_lit(b, vb)) return make_literal(va - vb);
  if (is_lit_eq(b, 0.0)) return a;
  return make_bin(Kind::sub, std::move(a), std::move(b));
}

NodePtr fold_mul(NodePtr a, NodePtr b) {
  double va, vb;
  if (is_lit(a, va) && is_lit(b, vb)) return make_literal(va * vb);
  if (is_lit_eq(a, 0.0) || is_lit_eq(b, 0.0)) return zero_node();
  if (is_lit_eq(a, 1.0)) return b;
  if (is_lit_eq(b, 1.0)) return a;
  return make_bin(Kind::mul, std::move(a), std::move(b));
}

NodePtr fold_div(NodePtr a, NodePtr b) {
  double va, vb;
  if (is_lit(b, vb) && vb != 0.0) {
    if (is_lit(a, va)) return make_literal(va / vb);
    if (vb == 1.0) return a;
  }
  if (is_lit_eq(a, 0.0)) return zero_node();
  return make_bin(Kind::div, std::move(a), std::move(b));
}

double ipow(double base, int e) {
  if (e == 0) return 1.0;
  bool neg = e < 0;
  unsigned long n = neg ? -static_cast<long>(e) : static_cast<long>(e);
  double r = 1.0, p = base;
  while (n) {
    if (n & 1u) r *= p;
    p *= p;
    n >>= 1;
  }
  return neg ? 1.0 / r : r;
}

NodePtr fold_pow(NodePtr a, int e) {
  if (e == 1) return a;
  if (e == 0) return one_node();
  double va;
  if (is_lit(a, va) && !(va == 0.0 && e < 0)) return make_literal(ipow(va, e));
  auto n = std::make_shared<Node>();
  n->kind = Kind::pow_int;
  n->exponent = e;
  n->a = std::move(a);
  return n;
}

bool call_in_domain(Expr::Func f, double x) {
  switch (f) {
    case Expr::Func::log:
      return x > 0.0;
    case Expr::Func::sqrt:
      return x >= 0.0;
    default:
      return true;
  }
}

double call_eval(Expr::Func f, double x) {
  switch (f) {
    case Expr::Func::sin:
      return std::sin(x);
    case Expr::Func::cos:
      return std::cos(x);
    case Expr::Func::exp:
      return std::exp(x);
    case Expr::Func::log:
      return std::log(x);
    case Expr::Func::sqrt:
      return std::sqrt(x);
  }
  return 0.0;  // unreachable
}

const char* func_name(Expr::Func f) {
  switch (f) {
    case Expr::Func::sin:
      return "sin";
    case Expr::Func::cos:
      return "cos";
    case Expr::Func::exp:
      return "exp";
    case Expr::Func::log:
      return "log";
    case Expr::Func::sqrt:
      return "sqrt";
  }
  return "?";
}

NodePtr fold_call(Expr::Func f, NodePtr a) {
  double va;
  if (is_lit(a, va) && call_in_domain(f, va)) return make_literal(call_eval(f, va));
  auto n = std::make_shared<Node>();
  n->kind = Kind::call;
  n->fn = f;
  n->a = std::move(a);
  return n;
}

double eval_node(const Node& n, double x, double y) {
  switch (n.kind) {
    case Kind::literal:
      return n.value;
    case Kind::variable:
      return n.var == Var::x ? x : y;
    case Kind::add:
      return eval_node(*n.a, x, y) + eval_node(*n.b, x, y);
    case Kind::sub:
      return eval_node(*n.a, x, y) - eval_node(*n.b, x, y);
    case Kind::mul:
      return eval_node(*n.a, x, y) * eval_node(*n.b, x, y);
    case Kind::div: {
      double den = eval_node(*n.b, x, y);
      if (den == 0.0) throw EvalDomainError("division by zero");
      return eval_node(*n.a, x, y) / den;
    }
    case Kind::pow_int: {
      double base = eval_node(*n.a, x, y);
      if (base == 0.0 && n.exponent < 0)
        throw EvalDomainError("zero raised to a negative power");
      return ipow(base, n.exponent);
    }
    case Kind::call: {
      double arg = eval_node(*n.a, x, y);
      if (!call_in_domain(n.fn, arg)) {
        std::ostringstream os;
        os << func_name(n.fn) << " evaluated outside its domain (argument " << arg
           << ")";
        throw EvalDomainError(os.str());
      }
      return call_eval(n.fn, arg);
    }
  }
  return 0.0;  // unreachable
}

NodePtr diff_node(const NodePtr& n, Var v);

NodePtr diff_call(const NodePtr& n, Var v) {
  const NodePtr& u = n->a;
  NodePtr du = diff_node(u, v);
  switch (n->fn) {
    case Expr::Func::sin:
      return fold_mul(fold_call(Expr::Func::cos, u), du);
    case Expr::Func::cos:
      return fold_mul(fold_sub(zero_node(), fold_call(Expr::Func::sin, u)), du);
    case Expr::Func::exp:
      return fold_mul(fold_call(Expr::Func::exp, u), du);
    case Expr::Func::log:
      return fold_div(du, u);
    case Expr::Func::sqrt:
      return fold_div(du, fold_mul(make_literal(2.0), fold_call(Expr::Func::sqrt, u)));
  }
  return zero_node();  // unreachable
}

NodePtr diff_node(const NodePtr& n, Var v) {
  switch (n->kind) {
    case Kind::literal:
      return zero_node();
    case Kind::variable:
      return n->var == v ? one_node() : zero_node();
    case Kind::add:
      return fold_add(diff_node(n->a, v), diff_node(n->b, v));
    case Kind::sub:
      return fold_sub(diff_node(n->a, v), diff_node(n->b, v));
    case Kind::mul:
      return fold_add(fold_mul(diff_node(n->a, v), n->b),
                      fold_mul(n->a, diff_node(n->b, v)));
    case Kind::div:
      // (a/b)' = (a'b - ab') / b^2
      return fold_div(fold_sub(fold_mul(diff_node(n->a, v), n->b),
                               fold_mul(n->a, diff_node(n->b, v))),
                      fold_pow(n->b, 2));
    case Kind::pow_int:
      // (u^k)' = k u^(k-1) u'
      return fold_mul(fold_mul(make_literal(static_cast<double>(n->exponent)),
                               fold_pow(n->a, n->exponent - 1)),
                      diff_node(n->a, v));
    case Kind::call:
      return diff_call(n, v);
  }
  return zero_node();  // unreachable
}

int precedence(Kind k) {
  switch (k) {
    case Kind::add:
    case Kind::sub:
      return 1;
    case Kind::mul:
    case Kind::div:
      return 2;
    case Kind::pow_int:
      return 3;
    default:
      return 4;
  }
}

void print_node(std::ostream& os, const Node& n, int parent_prec) {
  int prec = precedence(n.kind);
  bool parens = prec < parent_prec;
  switch (n.kind) {
    case Kind::literal: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      if (n.value < 0) os << '(' << buf << ')';
      else os << buf;
      return;
    }
    case Kind::variable:
      os << (n.var == Var::x ? 'x' : 'y');
      return;
    case Kind::add:
      if (parens) os << '(';
      print_node(os, *n.a, prec);
      os << " + ";
      print_node(os, *n.b, prec);
      if (parens) os << ')';
      return;
    case Kind::sub:
      if (parens) os << '(';
      print_node(os, *n.a, prec);
      os << " - ";
      print_node(os, *n.b, prec + 1);  // a - (b - c) must keep parens
      if (parens) os << ')';
      return;
    case Kind::mul:
      if (parens) os << '(';
      print_node(os, *n.a, prec);
      os << " * ";
      print_node(os, *n.b, prec);
      if (parens) os << ')';
      return;
    case Kind::div:
      if (parens) os << '(';
      print_node(os, *n.a, prec);
      os << " / ";
      print_node(os, *n.b, prec + 1);
      if (parens) os << ')';
      return;
    case Kind::pow_int:
      print_node(os, *n.a, prec + 1);  // base of ^ always atomic or wrapped
      os << '^';
      if (n.exponent < 0) os << '(' << n.exponent << ')';
      else os << n.exponent;
      return;
    case Kind::call:
      os << func_name(n.fn) << '(';
      print_node(os, *n.a, 0);
      os << ')';
      return;
  }
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over a token stream.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('-' | '+') unary | power
//   power  := atom ('^' intlit)?
//   atom   := number | 'x' | 'y' | func '(' expr ')' | '(' expr ')'
//   intlit := ('-' | '+')? digits
// ---------------------------------------------------------------------------

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr run() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("empty expression", 0);
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ < src_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool accept(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!accept(c))
      throw ParseError(std::string("expected ") + what, pos_);
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    for (;;) {
      if (accept('+'))
        e = fold_add(e, parse_term());
      else if (accept('-'))
        e = fold_sub(e, parse_term());
      else
        return e;
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_unary();
    for (;;) {
      if (accept('*'))
        e = fold_mul(e, parse_unary());
      else if (accept('/'))
        e = fold_div(e, parse_unary());
      else
        return e;
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return fold_sub(zero_node(), parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (accept('^')) return fold_pow(base, parse_int_literal());
    return base;
  }

  int parse_int_literal() {
    skip_ws();
    std::size_t start = pos_;
    bool wrapped = accept('(');
    skip_ws();
    std::size_t num_start = pos_;
    if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) ++pos_;
    std::size_t digits_start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    if (pos_ == digits_start)
      throw ParseError("expected an integer literal exponent", num_start);
    if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
      throw ParseError("exponent must be an integer literal", num_start);
    long v = std::strtol(std::string(src_.substr(num_start, pos_ - num_start)).c_str(),
                         nullptr, 10);
    if (v > 1000 || v < -1000)
      throw ParseError("exponent out of range [-1000, 1000]", start);
    if (wrapped) expect(')', "')' after exponent");
    return static_cast<int>(v);
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size())
      throw ParseError("expected a number, variable, function or '('", pos_);
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      expect(')', "')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    throw ParseError("expected a number, variable, function or '('", pos_);
  }

  NodePtr parse_number() {
    const char* begin = src_.data() + pos_;
    char* end = nullptr;
    std::string tail(src_.substr(pos_));  // strtod needs NUL termination
    double v = std::strtod(tail.c_str(), &end);
    if (end == tail.c_str())
      throw ParseError("malformed number", pos_);
    pos_ += static_cast<std::size_t>(end - tail.c_str());
    (void)begin;
    return make_literal(v);
  }

  NodePtr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    if (name == "x") return make_bin_var(Var::x);
    if (name == "y") return make_bin_var(Var::y);
    Expr::Func f;
    if (name == "sin") f = Expr::Func::sin;
    else if (name == "cos") f = Expr::Func::cos;
    else if (name == "exp") f = Expr::Func::exp;
    else if (name == "log") f = Expr::Func::log;
    else if (name == "sqrt") f = Expr::Func::sqrt;
    else throw ParseError("unknown identifier '" + name + "'", start);
    expect('(', "'(' after function name");
    NodePtr arg = parse_expr();
    expect(')', "')'");
    return fold_call(f, arg);
  }

  static NodePtr make_bin_var(Var v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::variable;
    n->var = v;
    return n;
  }
};

}  // namespace

Expr::Expr() : node_(zero_node()) {}

Expr Expr::literal(double v) { return Expr(make_literal(v)); }

Expr Expr::variable(Var v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::variable;
  n->var = v;
  return Expr(std::move(n));
}

Expr Expr::apply(Func f, const Expr& arg) { return Expr(fold_call(f, arg.node_)); }

Expr operator+(const Expr& a, const Expr& b) { return Expr(fold_add(a.node_, b.node_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(fold_sub(a.node_, b.node_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(fold_mul(a.node_, b.node_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(fold_div(a.node_, b.node_)); }

Expr Expr::operator-() const { return Expr(fold_sub(zero_node(), node_)); }

Expr Expr::pow(int exponent) const { return Expr(fold_pow(node_, exponent)); }

double Expr::eval(double x, double y) const { return eval_node(*node_, x, y); }

Expr Expr::diff(Var v) const { return Expr(diff_node(node_, v)); }

std::string Expr::str() const {
  std::ostringstream os;
  print_node(os, *node_, 0);
  return os.str();
}

bool Expr::is_literal() const { return node_->kind == Kind::literal; }

bool Expr::is_literal(double& value) const {
  if (node_->kind == Kind::literal) {
    value = node_->value;
    return true;
  }
  return false;
}

bool Expr::is_zero() const {
  return node_->kind == Kind::literal && node_->value == 0.0;
}

Expr parse(std::string_view src) { return Expr(Parser(src).run()); }

double eval_at(const Expr& e, double x, double y) { return e.eval(x, y); }

Expr differentiate(const Expr& e, Var v) { return e.diff(v); }

}  // namespace driftlab
