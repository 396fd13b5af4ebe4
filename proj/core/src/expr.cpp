#include "compint/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>

namespace compint {

Cplx ipow(Cplx base, long exponent) {
  if (exponent == 0) return is_divergent(base) ? base : Cplx{1.0, 0.0};
  bool invert = exponent < 0;
  unsigned long e = invert ? -static_cast<unsigned long>(exponent)
                           : static_cast<unsigned long>(exponent);
  Cplx acc{1.0, 0.0};
  Cplx sq = base;
  while (e != 0) {
    if (e & 1UL) acc *= sq;
    e >>= 1UL;
    if (e != 0) sq *= sq;
  }
  if (!invert) return acc;
  if (acc == Cplx{0.0, 0.0}) return divergence_sentinel();
  return Cplx{1.0, 0.0} / acc;
}

struct Expr::Node {
  Kind kind;
  Cplx value{};       // Constant
  Var var{};          // Variable
  long exponent = 0;  // IntPower
  Expr a, b;
};

Expr Expr::constant(Cplx value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(Var v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->var = v;
  return Expr(std::move(n));
}

Expr Expr::negate(Expr a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Negate;
  n->a = std::move(a);
  return Expr(std::move(n));
}

Expr Expr::add(Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Add;
  n->a = std::move(a);
  n->b = std::move(b);
  return Expr(std::move(n));
}

Expr Expr::sub(Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sub;
  n->a = std::move(a);
  n->b = std::move(b);
  return Expr(std::move(n));
}

Expr Expr::mul(Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Mul;
  n->a = std::move(a);
  n->b = std::move(b);
  return Expr(std::move(n));
}

Expr Expr::div(Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Div;
  n->a = std::move(a);
  n->b = std::move(b);
  return Expr(std::move(n));
}

Expr Expr::int_power(Expr base, long exponent) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::IntPower;
  n->a = std::move(base);
  n->exponent = exponent;
  return Expr(std::move(n));
}

Expr Expr::call(Kind fn, Expr a) {
  if (fn != Kind::Exp && fn != Kind::Log && fn != Kind::Sqrt &&
      fn != Kind::Sin && fn != Kind::Cos)
    throw std::invalid_argument("Expr::call expects a function kind");
  auto n = std::make_shared<Node>();
  n->kind = fn;
  n->a = std::move(a);
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const {
  if (!node_) throw EvalError("empty expression handle");
  return node_->kind;
}

Cplx Expr::constant_value() const { return node_->value; }
Var Expr::variable_id() const { return node_->var; }
long Expr::exponent() const { return node_->exponent; }
const Expr& Expr::left() const { return node_->a; }
const Expr& Expr::right() const { return node_->b; }

Cplx Expr::eval(const Bindings& b) const {
  if (!node_) throw EvalError("empty expression handle");
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant:
      return n.value;
    case Kind::Variable: {
      const std::optional<Cplx>* slot = nullptr;
      const char* name = "";
      switch (n.var) {
        case Var::S: slot = &b.s; name = "s"; break;
        case Var::Z: slot = &b.z; name = "z"; break;
        case Var::W: slot = &b.w; name = "w"; break;
      }
      if (!slot->has_value())
        throw EvalError(std::string("unbound variable '") + name + "'");
      return **slot;
    }
    case Kind::Negate:
      return -n.a.eval(b);
    case Kind::Add:
      return n.a.eval(b) + n.b.eval(b);
    case Kind::Sub:
      return n.a.eval(b) - n.b.eval(b);
    case Kind::Mul:
      return n.a.eval(b) * n.b.eval(b);
    case Kind::Div: {
      Cplx num = n.a.eval(b);
      Cplx den = n.b.eval(b);
      if (den == Cplx{0.0, 0.0}) return divergence_sentinel();
      return num / den;
    }
    case Kind::IntPower:
      return ipow(n.a.eval(b), n.exponent);
    case Kind::Exp:
      return std::exp(n.a.eval(b));
    case Kind::Log: {
      Cplx v = n.a.eval(b);
      if (v == Cplx{0.0, 0.0}) return divergence_sentinel();
      return std::log(v);
    }
    case Kind::Sqrt:
      return std::sqrt(n.a.eval(b));
    case Kind::Sin:
      return std::sin(n.a.eval(b));
    case Kind::Cos:
      return std::cos(n.a.eval(b));
  }
  throw EvalError("corrupt expression node");
}

DualValue Expr::eval_dual(const Bindings& b) const {
  if (!node_) throw EvalError("empty expression handle");
  const Node& n = *node_;
  const Cplx zero{0.0, 0.0};
  switch (n.kind) {
    case Kind::Constant:
      return {n.value, zero};
    case Kind::Variable: {
      Cplx v = eval(b);
      return {v, n.var == Var::Z ? Cplx{1.0, 0.0} : zero};
    }
    case Kind::Negate: {
      DualValue a = n.a.eval_dual(b);
      return {-a.value, -a.deriv};
    }
    case Kind::Add: {
      DualValue a = n.a.eval_dual(b), c = n.b.eval_dual(b);
      return {a.value + c.value, a.deriv + c.deriv};
    }
    case Kind::Sub: {
      DualValue a = n.a.eval_dual(b), c = n.b.eval_dual(b);
      return {a.value - c.value, a.deriv - c.deriv};
    }
    case Kind::Mul: {
      DualValue a = n.a.eval_dual(b), c = n.b.eval_dual(b);
      return {a.value * c.value, a.deriv * c.value + a.value * c.deriv};
    }
    case Kind::Div: {
      DualValue a = n.a.eval_dual(b), c = n.b.eval_dual(b);
      if (c.value == zero) return {divergence_sentinel(), divergence_sentinel()};
      Cplx q = a.value / c.value;
      return {q, (a.deriv - q * c.deriv) / c.value};
    }
    case Kind::IntPower: {
      DualValue a = n.a.eval_dual(b);
      long k = n.exponent;
      Cplx v = ipow(a.value, k);
      if (k == 0) return {v, zero};
      if (a.value == zero && k < 0)
        return {divergence_sentinel(), divergence_sentinel()};
      Cplx d = static_cast<double>(k) * ipow(a.value, k - 1) * a.deriv;
      return {v, d};
    }
    case Kind::Exp: {
      DualValue a = n.a.eval_dual(b);
      Cplx v = std::exp(a.value);
      return {v, v * a.deriv};
    }
    case Kind::Log: {
      DualValue a = n.a.eval_dual(b);
      if (a.value == zero)
        return {divergence_sentinel(), divergence_sentinel()};
      return {std::log(a.value), a.deriv / a.value};
    }
    case Kind::Sqrt: {
      DualValue a = n.a.eval_dual(b);
      Cplx v = std::sqrt(a.value);
      if (v == zero) return {v, divergence_sentinel()};
      return {v, a.deriv / (2.0 * v)};
    }
    case Kind::Sin: {
      DualValue a = n.a.eval_dual(b);
      return {std::sin(a.value), std::cos(a.value) * a.deriv};
    }
    case Kind::Cos: {
      DualValue a = n.a.eval_dual(b);
      return {std::cos(a.value), -std::sin(a.value) * a.deriv};
    }
  }
  throw EvalError("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Printer

namespace {

std::string format_double(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

// Prints a constant as an atom-level token, parenthesizing composite or
// signed literals so the result stays valid in any operand position.
std::string print_constant(const Cplx& v) {
  double re = v.real(), im = v.imag();
  if (re == 0.0) re = 0.0;  // drop the sign of a negative zero
  if (im == 0.0) im = 0.0;
  if (im == 0.0) {
    if (re >= 0.0) return format_double(re);
    return "(" + format_double(re) + ")";
  }
  if (re == 0.0) {
    if (im == 1.0) return "i";
    if (im >= 0.0) return format_double(im) + "i";
    return "(" + format_double(im) + "i)";
  }
  std::string s = "(" + format_double(re);
  if (im >= 0.0) s += "+";
  if (im == 1.0)
    s += "i";
  else if (im == -1.0)
    s += "-i";
  else
    s += format_double(im) + "i";
  return s + ")";
}

// Grammar slots: 1 additive, 2 multiplicative, 3 factor, 4 unary, 5 atom.
// A power may not nest as the base of another power, and the operand of a
// unary minus must be an atom, so IntPower sits below Negate here.
int level_of(Expr::Kind k) {
  using K = Expr::Kind;
  switch (k) {
    case K::Add:
    case K::Sub:
      return 1;
    case K::Mul:
    case K::Div:
      return 2;
    case K::IntPower:
      return 3;
    case K::Negate:
      return 4;
    default:
      return 5;
  }
}

void print(const Expr& e, int min_level, std::string& out) {
  using K = Expr::Kind;
  const K k = e.kind();
  const int lvl = level_of(k);
  const bool wrap = lvl < min_level;
  if (wrap) out += "(";
  switch (k) {
    case K::Constant:
      out += print_constant(e.constant_value());
      break;
    case K::Variable:
      out += e.variable_id() == Var::S ? "s"
             : e.variable_id() == Var::Z ? "z"
                                         : "w";
      break;
    case K::Negate:
      out += "-";
      print(e.left(), 5, out);  // grammar allows only an atom after unary '-'
      break;
    case K::Add:
    case K::Sub:
      print(e.left(), 1, out);
      out += (k == K::Add) ? "+" : "-";
      print(e.right(), 2, out);
      break;
    case K::Mul:
    case K::Div:
      print(e.left(), 2, out);
      out += (k == K::Mul) ? "*" : "/";
      print(e.right(), 3, out);
      break;
    case K::IntPower:
      print(e.left(), 4, out);
      out += "^";
      out += std::to_string(e.exponent());
      break;
    case K::Exp:
    case K::Log:
    case K::Sqrt:
    case K::Sin:
    case K::Cos: {
      const char* name = k == K::Exp    ? "exp"
                         : k == K::Log  ? "log"
                         : k == K::Sqrt ? "sqrt"
                         : k == K::Sin  ? "sin"
                                        : "cos";
      out += name;
      out += "(";
      print(e.left(), 1, out);
      out += ")";
      break;
    }
  }
  if (wrap) out += ")";
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print(*this, 1, out);
  return out;
}

bool depends_on(const Expr& e, Var v) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return false;
    case Expr::Kind::Variable:
      return e.variable_id() == v;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      return depends_on(e.left(), v) || depends_on(e.right(), v);
    default:
      return depends_on(e.left(), v);
  }
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Parser {
  std::string_view src;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg, std::size_t at) {
    throw ParseError(msg + " at offset " + std::to_string(at), at);
  }

  void skip_ws() {
    while (pos < src.size() &&
           std::isspace(static_cast<unsigned char>(src[pos])))
      ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  Expr expr() {
    Expr acc = term();
    for (;;) {
      if (eat('+'))
        acc = Expr::add(std::move(acc), term());
      else if (eat('-'))
        acc = Expr::sub(std::move(acc), term());
      else
        return acc;
    }
  }

  Expr term() {
    Expr acc = factor();
    for (;;) {
      if (eat('*'))
        acc = Expr::mul(std::move(acc), factor());
      else if (eat('/'))
        acc = Expr::div(std::move(acc), factor());
      else
        return acc;
    }
  }

  Expr factor() {
    Expr base = unary();
    if (eat('^')) return Expr::int_power(std::move(base), int_exponent());
    return base;
  }

  long int_exponent() {
    skip_ws();
    std::size_t start = pos;
    bool neg = false;
    if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) {
      neg = src[pos] == '-';
      ++pos;
    }
    std::size_t digits_start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
      ++pos;
    if (pos == digits_start) fail("expected integer exponent", start);
    if (pos < src.size() && src[pos] == '.')
      fail("non-integer exponent", start);
    long v = std::strtol(std::string(src.substr(digits_start, pos - digits_start)).c_str(),
                         nullptr, 10);
    return neg ? -v : v;
  }

  Expr unary() {
    if (eat('-')) {
      Expr a = atom();
      // Fold the sign into literals so "-1" keeps a positive-zero imaginary
      // part ("-2i" a positive-zero real part). IEEE negation of +0.0 gives
      // -0.0, which would put sqrt(-1) on the wrong side of the branch cut.
      if (a.kind() == Expr::Kind::Constant) {
        const Cplx v = a.constant_value();
        return Expr::constant(Cplx{v.real() == 0.0 ? 0.0 : -v.real(),
                                   v.imag() == 0.0 ? 0.0 : -v.imag()});
      }
      return Expr::negate(std::move(a));
    }
    return atom();
  }

  Expr atom() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input", pos);
    const char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos;
      Expr e = expr();
      if (!eat(')')) fail("expected ')'", pos);
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'", pos);
  }

  Expr number() {
    std::size_t start = pos;
    const auto digit = [&](std::size_t i) {
      return i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]));
    };
    while (digit(pos)) ++pos;
    if (pos < src.size() && src[pos] == '.') {
      ++pos;
      while (digit(pos)) ++pos;
    }
    if (pos == start || (pos == start + 1 && src[start] == '.'))
      fail("expected a number", start);
    // Optional exponent part; only consumed when well formed so "2e" still
    // leaves 'e' for the caller (which then reports an error, since the
    // grammar has no implicit multiplication).
    if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
      std::size_t q = pos + 1;
      if (q < src.size() && (src[q] == '+' || src[q] == '-')) ++q;
      if (digit(q)) {
        while (digit(q)) ++q;
        pos = q;
      }
    }
    double mag =
        std::strtod(std::string(src.substr(start, pos - start)).c_str(), nullptr);
    // Trailing 'i' marks an imaginary literal unless it starts an identifier.
    if (pos < src.size() && src[pos] == 'i' &&
        !(pos + 1 < src.size() &&
          std::isalnum(static_cast<unsigned char>(src[pos + 1])))) {
      ++pos;
      return Expr::constant(Cplx{0.0, mag});
    }
    return Expr::constant(Cplx{mag, 0.0});
  }

  Expr identifier() {
    std::size_t start = pos;
    while (pos < src.size() &&
           std::isalpha(static_cast<unsigned char>(src[pos])))
      ++pos;
    std::string_view name = src.substr(start, pos - start);
    if (name == "s") return Expr::variable(Var::S);
    if (name == "z") return Expr::variable(Var::Z);
    if (name == "w") return Expr::variable(Var::W);
    if (name == "i") return Expr::constant(Cplx{0.0, 1.0});
    if (name == "pi") return Expr::constant(Cplx{kPi, 0.0});
    if (name == "e") return Expr::constant(Cplx{std::exp(1.0), 0.0});
    Expr::Kind fn;
    if (name == "exp")
      fn = Expr::Kind::Exp;
    else if (name == "log")
      fn = Expr::Kind::Log;
    else if (name == "sqrt")
      fn = Expr::Kind::Sqrt;
    else if (name == "sin")
      fn = Expr::Kind::Sin;
    else if (name == "cos")
      fn = Expr::Kind::Cos;
    else
      fail("unknown identifier '" + std::string(name) + "'", start);
    if (!eat('(')) fail("expected '(' after function name", pos);
    Expr arg = expr();
    if (!eat(')')) fail("expected ')'", pos);
    return Expr::call(fn, std::move(arg));
  }
};

}  // namespace

Expr parse_expr(std::string_view source) {
  Parser p{source};
  Expr e = p.expr();
  p.skip_ws();
  if (p.pos != source.size())
    throw ParseError("unexpected trailing input at offset " +
                         std::to_string(p.pos),
                     p.pos);
  return e;
}

}  // namespace compint
