#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace stabkit {

enum class ExprKind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class VarKind { State, Control };  // x1..xn / u1..um
enum class FuncId { Cbrt, Sqrt, Sin, Cos, Exp, Abs };

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable scalar expression tree over variables x1..xn, u1..um.
// Grammar (whitespace insignificant, no implicit multiplication):
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := ("-")? base ("^" uint)?
//   base   := number | ident | "(" expr ")" | func "(" expr ")"
// Precedence: ^ > unary - > * / > + -.
class Expr {
 public:
  static ExprPtr number(double value);
  static ExprPtr var(VarKind kind, int index);  // index is 1-based
  static ExprPtr neg(ExprPtr e);
  static ExprPtr add(ExprPtr a, ExprPtr b);
  static ExprPtr sub(ExprPtr a, ExprPtr b);
  static ExprPtr mul(ExprPtr a, ExprPtr b);
  static ExprPtr div(ExprPtr a, ExprPtr b);
  static ExprPtr pow(ExprPtr base, int exponent);  // exponent is a literal integer >= 0
  static ExprPtr call(FuncId f, ExprPtr arg);

  ExprKind kind() const { return kind_; }
  double number_value() const { return number_; }
  VarKind var_kind() const { return var_kind_; }
  int var_index() const { return var_index_; }
  FuncId func() const { return func_; }
  int exponent() const { return exponent_; }
  const ExprPtr& lhs() const { return lhs_; }
  const ExprPtr& rhs() const { return rhs_; }

  // IEEE-754 double evaluation; cbrt is the real cube root.
  // Throws NumericDomainError on division by zero or sqrt of a negative.
  double evaluate(std::span<const double> x, std::span<const double> u) const;

  // Exact symbolic partial derivative with respect to the given variable.
  // The cbrt derivative is written as d(arg)/(3*cbrt(arg)^2), so evaluating it
  // at arg = 0 raises a NumericDomainError; likewise abs at 0 and sqrt at 0.
  ExprPtr derivative(VarKind kind, int index) const;

  // Prints so that parse_expression(to_string()) is structurally identical.
  std::string to_string() const;

  bool equals(const Expr& other) const;

  // Largest referenced 1-based index of the given variable kind, 0 if none.
  int max_index(VarKind kind) const;

 private:
  friend struct ExprBuilder;
  Expr() = default;

  ExprKind kind_ = ExprKind::Number;
  double number_ = 0.0;
  VarKind var_kind_ = VarKind::State;
  int var_index_ = 0;
  FuncId func_ = FuncId::Cbrt;
  int exponent_ = 0;
  ExprPtr lhs_, rhs_;
};

// Parses the grammar above. Throws ParseError (with byte offset) on syntax
// errors, unknown identifiers, and malformed numbers.
ExprPtr parse_expression(std::string_view text);

std::string_view func_name(FuncId f);

// Shortest decimal string that round-trips to exactly the same double.
std::string format_double(double v);

}  // namespace stabkit
