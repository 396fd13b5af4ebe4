#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "compint/scalar.hpp"

namespace compint {

enum class Var : std::uint8_t { S, Z, W };

// Forward-mode dual number carrying the value and d/dz at the evaluation
// point.  s and w are treated as parameters with zero derivative.
struct DualValue {
  Cplx value;
  Cplx deriv;
};

struct Bindings {
  std::optional<Cplx> s, z, w;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t offset_)
      : std::runtime_error(what), offset(offset_) {}
  std::size_t offset;  // byte offset into the source text
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integer power by repeated squaring; a negative exponent is the reciprocal
// of the positive power.  ipow(0, k<0) yields the divergence sentinel and
// ipow(x, 0) == 1 for finite x.
Cplx ipow(Cplx base, long exponent);

// Immutable expression tree over complex scalars with variables s, z, w.
// Copies are cheap (shared structure).  Division by exact zero and log at
// zero evaluate to the divergence sentinel rather than throwing; using an
// unbound variable throws EvalError.
class Expr {
 public:
  enum class Kind : std::uint8_t {
    Constant,
    Variable,
    Negate,
    Add,
    Sub,
    Mul,
    Div,
    IntPower,
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
  };

  Expr() = default;  // empty handle; evaluating one throws EvalError

  static Expr constant(Cplx value);
  static Expr variable(Var v);
  static Expr negate(Expr a);
  static Expr add(Expr a, Expr b);
  static Expr sub(Expr a, Expr b);
  static Expr mul(Expr a, Expr b);
  static Expr div(Expr a, Expr b);
  static Expr int_power(Expr base, long exponent);
  static Expr call(Kind fn, Expr a);  // Exp, Log, Sqrt, Sin, Cos

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  Cplx constant_value() const;  // Constant only
  Var variable_id() const;      // Variable only
  long exponent() const;        // IntPower only
  const Expr& left() const;     // unary operand / left child
  const Expr& right() const;    // right child of binary nodes

  Cplx eval(const Bindings& b) const;
  DualValue eval_dual(const Bindings& b) const;

  // Prints a form the parser accepts; parse(str()) evaluates identically.
  std::string str() const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// True when the expression mentions the given variable.
bool depends_on(const Expr& e, Var v);

// Recursive-descent parser for the expression grammar:
//
//   expr   := term (("+" | "-") term)*
//   term   := factor (("*" | "/") factor)*
//   factor := unary ("^" int)?
//   unary  := "-"? atom
//   atom   := number | "i" | "pi" | "e" | "s" | "z" | "w"
//           | func "(" expr ")" | "(" expr ")"
//   func   := "exp" | "log" | "sqrt" | "sin" | "cos"
//
// A number is a decimal with optional exponent part and optional trailing
// "i" ("2", "1.5", "2i", "1e-3").  Whitespace is ignored between tokens.
// Throws ParseError with the byte offset of the failure.
Expr parse_expr(std::string_view source);

}  // namespace compint
