#include "stabkit/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "stabkit/errors.hpp"

namespace stabkit {

struct ExprBuilder {
  static std::shared_ptr<Expr> raw() { return std::shared_ptr<Expr>(new Expr()); }
};

ExprPtr Expr::number(double value) {
  auto n = ExprBuilder::raw();
  n->kind_ = ExprKind::Number;
  n->number_ = value;
  return n;
}

ExprPtr Expr::var(VarKind kind, int index) {
  if (index < 1) throw std::invalid_argument("variable index must be >= 1");
  auto n = ExprBuilder::raw();
  n->kind_ = ExprKind::Var;
  n->var_kind_ = kind;
  n->var_index_ = index;
  return n;
}

ExprPtr Expr::neg(ExprPtr e) {
  auto n = ExprBuilder::raw();
  n->kind_ = ExprKind::Neg;
  n->lhs_ = std::move(e);
  return n;
}

ExprPtr Expr::add(ExprPtr a, ExprPtr b) {
  auto n = ExprBuilder::raw();
  n->kind_ = ExprKind::Add;
  n->lhs_ = std::move(a);
  n->rhs_ = std::move(b);
  return n;
}

ExprPtr Expr::sub(ExprPtr a, ExprPtr b) {
  auto n = ExprBuilder::raw();
  n->kind_ = ExprKind::Sub;
  n->lhs_ = std::move(a);
  n->rhs_ = std::move(b);
  return n;
}

ExprPtr Expr::mul(ExprPtr a, ExprPtr b) {
  auto n = ExprBuilder::raw();
  n->kind_ = ExprKind::Mul;
  n->lhs_ = std::move(a);
  n->rhs_ = std::move(b);
  return n;
}

ExprPtr Expr::div(ExprPtr a, ExprPtr b) {
  auto n = ExprBuilder::raw();
  n->kind_ = ExprKind::Div;
  n->lhs_ = std::move(a);
  n->rhs_ = std::move(b);
  return n;
}

ExprPtr Expr::pow(ExprPtr base, int exponent) {
  if (exponent < 0) throw std::invalid_argument("power exponent must be >= 0");
  auto n = ExprBuilder::raw();
  n->kind_ = ExprKind::Pow;
  n->lhs_ = std::move(base);
  n->exponent_ = exponent;
  return n;
}

ExprPtr Expr::call(FuncId f, ExprPtr arg) {
  auto n = ExprBuilder::raw();
  n->kind_ = ExprKind::Call;
  n->func_ = f;
  n->lhs_ = std::move(arg);
  return n;
}

std::string_view func_name(FuncId f) {
  switch (f) {
    case FuncId::Cbrt: return "cbrt";
    case FuncId::Sqrt: return "sqrt";
    case FuncId::Sin: return "sin";
    case FuncId::Cos: return "cos";
    case FuncId::Exp: return "exp";
    case FuncId::Abs: return "abs";
  }
  return "?";
}

namespace {

double int_pow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

double Expr::evaluate(std::span<const double> x, std::span<const double> u) const {
  switch (kind_) {
    case ExprKind::Number:
      return number_;
    case ExprKind::Var: {
      const auto& v = (var_kind_ == VarKind::State) ? x : u;
      if (var_index_ < 1 || static_cast<std::size_t>(var_index_) > v.size())
        throw std::out_of_range("variable index out of range");
      return v[static_cast<std::size_t>(var_index_ - 1)];
    }
    case ExprKind::Neg:
      return -lhs_->evaluate(x, u);
    case ExprKind::Add:
      return lhs_->evaluate(x, u) + rhs_->evaluate(x, u);
    case ExprKind::Sub:
      return lhs_->evaluate(x, u) - rhs_->evaluate(x, u);
    case ExprKind::Mul:
      return lhs_->evaluate(x, u) * rhs_->evaluate(x, u);
    case ExprKind::Div: {
      double den = rhs_->evaluate(x, u);
      if (den == 0.0) throw NumericDomainError("division by zero");
      return lhs_->evaluate(x, u) / den;
    }
    case ExprKind::Pow:
      return int_pow(lhs_->evaluate(x, u), exponent_);
    case ExprKind::Call: {
      double a = lhs_->evaluate(x, u);
      switch (func_) {
        case FuncId::Cbrt: return std::cbrt(a);
        case FuncId::Sqrt:
          if (a < 0.0) throw NumericDomainError("sqrt of a negative value");
          return std::sqrt(a);
        case FuncId::Sin: return std::sin(a);
        case FuncId::Cos: return std::cos(a);
        case FuncId::Exp: return std::exp(a);
        case FuncId::Abs: return std::abs(a);
      }
      break;
    }
  }
  throw std::logic_error("unreachable expression kind");
}

namespace {

// Constants in derivative trees are kept in the grammar's shape: a negative
// value becomes Neg(positive literal) so printed trees reparse structurally.
ExprPtr canonical_number(double v) {
  if (v < 0.0) return Expr::neg(Expr::number(-v));
  if (v == 0.0) return Expr::number(0.0);  // drops a negative zero sign
  return Expr::number(v);
}

// Treats Neg(literal) and literals interchangeably when folding.
bool const_value(const ExprPtr& e, double& out) {
  if (e->kind() == ExprKind::Number) {
    out = e->number_value();
    return true;
  }
  if (e->kind() == ExprKind::Neg && e->lhs()->kind() == ExprKind::Number) {
    out = -e->lhs()->number_value();
    return true;
  }
  return false;
}

bool is_const(const ExprPtr& e, double v) {
  double got;
  return const_value(e, got) && got == v;
}

// Folding constructors used by derivative() to keep trees small. Only
// constants are folded; no other rewriting.
ExprPtr f_add(ExprPtr a, ExprPtr b) {
  double ca, cb;
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (const_value(a, ca) && const_value(b, cb)) return canonical_number(ca + cb);
  return Expr::add(std::move(a), std::move(b));
}

ExprPtr f_neg(ExprPtr a) {
  double ca;
  if (const_value(a, ca)) return canonical_number(-ca);
  if (a->kind() == ExprKind::Neg) return a->lhs();
  return Expr::neg(std::move(a));
}

ExprPtr f_sub(ExprPtr a, ExprPtr b) {
  double ca, cb;
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return f_neg(std::move(b));
  if (const_value(a, ca) && const_value(b, cb)) return canonical_number(ca - cb);
  return Expr::sub(std::move(a), std::move(b));
}

ExprPtr f_mul(ExprPtr a, ExprPtr b) {
  double ca, cb;
  if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::number(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (const_value(a, ca) && const_value(b, cb)) return canonical_number(ca * cb);
  return Expr::mul(std::move(a), std::move(b));
}

ExprPtr f_div(ExprPtr a, ExprPtr b) {
  double ca, cb;
  if (is_const(a, 0.0)) return Expr::number(0.0);
  if (is_const(b, 1.0)) return a;
  if (const_value(a, ca) && const_value(b, cb) && cb != 0.0) return canonical_number(ca / cb);
  return Expr::div(std::move(a), std::move(b));
}

ExprPtr f_pow(ExprPtr base, int e) {
  double cb;
  if (e == 0) return Expr::number(1.0);
  if (e == 1) return base;
  if (const_value(base, cb)) return canonical_number(int_pow(cb, e));
  return Expr::pow(std::move(base), e);
}

}  // namespace

ExprPtr Expr::derivative(VarKind kind, int index) const {
  switch (kind_) {
    case ExprKind::Number:
      return number(0.0);
    case ExprKind::Var:
      return number((var_kind_ == kind && var_index_ == index) ? 1.0 : 0.0);
    case ExprKind::Neg:
      return f_neg(lhs_->derivative(kind, index));
    case ExprKind::Add:
      return f_add(lhs_->derivative(kind, index), rhs_->derivative(kind, index));
    case ExprKind::Sub:
      return f_sub(lhs_->derivative(kind, index), rhs_->derivative(kind, index));
    case ExprKind::Mul:
      return f_add(f_mul(lhs_->derivative(kind, index), rhs_),
                   f_mul(lhs_, rhs_->derivative(kind, index)));
    case ExprKind::Div:
      // (a'b - ab') / b^2
      return f_div(f_sub(f_mul(lhs_->derivative(kind, index), rhs_),
                         f_mul(lhs_, rhs_->derivative(kind, index))),
                   f_pow(rhs_, 2));
    case ExprKind::Pow:
      // k * base^(k-1) * base'
      if (exponent_ == 0) return number(0.0);
      return f_mul(f_mul(number(static_cast<double>(exponent_)), f_pow(lhs_, exponent_ - 1)),
                   lhs_->derivative(kind, index));
    case ExprKind::Call: {
      ExprPtr da = lhs_->derivative(kind, index);
      switch (func_) {
        case FuncId::Cbrt:
          // da / (3 * cbrt(a)^2), undefined at a = 0
          return f_div(da, f_mul(number(3.0), f_pow(call(FuncId::Cbrt, lhs_), 2)));
        case FuncId::Sqrt:
          return f_div(da, f_mul(number(2.0), call(FuncId::Sqrt, lhs_)));
        case FuncId::Sin:
          return f_mul(call(FuncId::Cos, lhs_), da);
        case FuncId::Cos:
          return f_neg(f_mul(call(FuncId::Sin, lhs_), da));
        case FuncId::Exp:
          return f_mul(call(FuncId::Exp, lhs_), da);
        case FuncId::Abs:
          // a * da / |a|, undefined at a = 0
          return f_div(f_mul(lhs_, da), call(FuncId::Abs, lhs_));
      }
      break;
    }
  }
  throw std::logic_error("unreachable expression kind");
}

std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {

// Precedence levels matching the grammar: + - (1), * / (2), unary - (3),
// ^ (4), atoms (5).
int node_prec(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Neg: return 3;
    case ExprKind::Pow: return 4;
    case ExprKind::Number: return e.number_value() < 0 ? 3 : 5;
    case ExprKind::Var:
    case ExprKind::Call: return 5;
  }
  return 5;
}

void print_node(const Expr& e, std::string& out);

void print_child(const Expr& e, int min_prec, std::string& out) {
  if (node_prec(e) < min_prec) {
    out += '(';
    print_node(e, out);
    out += ')';
  } else {
    print_node(e, out);
  }
}

void print_node(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case ExprKind::Number:
      out += format_double(e.number_value());
      return;
    case ExprKind::Var:
      out += (e.var_kind() == VarKind::State) ? 'x' : 'u';
      out += std::to_string(e.var_index());
      return;
    case ExprKind::Neg:
      out += '-';
      print_child(*e.lhs(), 4, out);
      return;
    case ExprKind::Add:
      print_child(*e.lhs(), 1, out);
      out += " + ";
      print_child(*e.rhs(), 2, out);
      return;
    case ExprKind::Sub:
      print_child(*e.lhs(), 1, out);
      out += " - ";
      print_child(*e.rhs(), 2, out);
      return;
    case ExprKind::Mul:
      print_child(*e.lhs(), 2, out);
      out += '*';
      print_child(*e.rhs(), 3, out);
      return;
    case ExprKind::Div:
      print_child(*e.lhs(), 2, out);
      out += '/';
      print_child(*e.rhs(), 3, out);
      return;
    case ExprKind::Pow:
      print_child(*e.lhs(), 5, out);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    case ExprKind::Call:
      out += func_name(e.func());
      out += '(';
      print_node(*e.lhs(), out);
      out += ')';
      return;
  }
}

}  // namespace

std::string Expr::to_string() const {
  std::string out;
  print_node(*this, out);
  return out;
}

bool Expr::equals(const Expr& o) const {
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case ExprKind::Number: return number_ == o.number_;
    case ExprKind::Var: return var_kind_ == o.var_kind_ && var_index_ == o.var_index_;
    case ExprKind::Neg: return lhs_->equals(*o.lhs_);
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div: return lhs_->equals(*o.lhs_) && rhs_->equals(*o.rhs_);
    case ExprKind::Pow: return exponent_ == o.exponent_ && lhs_->equals(*o.lhs_);
    case ExprKind::Call: return func_ == o.func_ && lhs_->equals(*o.lhs_);
  }
  return false;
}

int Expr::max_index(VarKind kind) const {
  switch (kind_) {
    case ExprKind::Number: return 0;
    case ExprKind::Var: return var_kind_ == kind ? var_index_ : 0;
    case ExprKind::Neg:
    case ExprKind::Pow:
    case ExprKind::Call: return lhs_->max_index(kind);
    default:
      return std::max(lhs_->max_index(kind), rhs_->max_index(kind));
  }
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;   // idents
  double value = 0;   // numbers
  bool plain_uint = false;  // number literal consisting of digits only
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    tok_.offset = pos_;
    tok_.text.clear();
    tok_.plain_uint = false;
    if (pos_ >= text_.size()) {
      tok_.kind = Tok::End;
      return;
    }
    char c = text_[pos_];
    switch (c) {
      case '+': tok_.kind = Tok::Plus; ++pos_; return;
      case '-': tok_.kind = Tok::Minus; ++pos_; return;
      case '*': tok_.kind = Tok::Star; ++pos_; return;
      case '/': tok_.kind = Tok::Slash; ++pos_; return;
      case '^': tok_.kind = Tok::Caret; ++pos_; return;
      case '(': tok_.kind = Tok::LParen; ++pos_; return;
      case ')': tok_.kind = Tok::RParen; ++pos_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      tok_.kind = Tok::Ident;
      tok_.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  void lex_number() {
    std::size_t start = pos_;
    bool digits_only = true;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      digits_only = false;
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      digits_only = false;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw ParseError("malformed number", start);
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    std::string_view s = text_.substr(start, pos_ - start);
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw ParseError("malformed number", start);
    tok_.kind = Tok::Number;
    tok_.value = v;
    tok_.plain_uint = digits_only;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token tok_;
};

bool lookup_func(const std::string& name, FuncId& out) {
  if (name == "cbrt") out = FuncId::Cbrt;
  else if (name == "sqrt") out = FuncId::Sqrt;
  else if (name == "sin") out = FuncId::Sin;
  else if (name == "cos") out = FuncId::Cos;
  else if (name == "exp") out = FuncId::Exp;
  else if (name == "abs") out = FuncId::Abs;
  else return false;
  return true;
}

bool lookup_var(const std::string& name, VarKind& kind, int& index) {
  if (name.size() < 2) return false;
  if (name[0] == 'x') kind = VarKind::State;
  else if (name[0] == 'u') kind = VarKind::Control;
  else return false;
  if (name[1] == '0') return false;  // indices are 1-based, no leading zeros
  for (std::size_t i = 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
  index = std::atoi(name.c_str() + 1);
  return index >= 1;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  ExprPtr parse() {
    ExprPtr e = parse_expr();
    if (lex_.peek().kind != Tok::End)
      throw ParseError("unexpected trailing input", lex_.peek().offset);
    return e;
  }

 private:
  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
      Tok op = lex_.take().kind;
      ExprPtr r = parse_term();
      e = (op == Tok::Plus) ? Expr::add(e, r) : Expr::sub(e, r);
    }
    return e;
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    while (lex_.peek().kind == Tok::Star || lex_.peek().kind == Tok::Slash) {
      Tok op = lex_.take().kind;
      ExprPtr r = parse_factor();
      e = (op == Tok::Star) ? Expr::mul(e, r) : Expr::div(e, r);
    }
    return e;
  }

  ExprPtr parse_factor() {
    bool negate = false;
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      negate = true;
    }
    ExprPtr e = parse_base();
    if (lex_.peek().kind == Tok::Caret) {
      lex_.take();
      Token t = lex_.peek();
      if (t.kind != Tok::Number || !t.plain_uint)
        throw ParseError("power exponent must be a nonnegative integer literal", t.offset);
      lex_.take();
      e = Expr::pow(e, static_cast<int>(t.value));
    }
    return negate ? Expr::neg(e) : e;
  }

  ExprPtr parse_base() {
    Token t = lex_.peek();
    switch (t.kind) {
      case Tok::Number:
        lex_.take();
        return Expr::number(t.value);
      case Tok::LParen: {
        lex_.take();
        ExprPtr e = parse_expr();
        expect(Tok::RParen, "expected ')'");
        return e;
      }
      case Tok::Ident: {
        lex_.take();
        if (lex_.peek().kind == Tok::LParen) {
          FuncId f;
          if (!lookup_func(t.text, f))
            throw ParseError("unknown function '" + t.text + "'", t.offset);
          lex_.take();
          ExprPtr arg = parse_expr();
          expect(Tok::RParen, "expected ')'");
          return Expr::call(f, arg);
        }
        VarKind kind;
        int index;
        if (!lookup_var(t.text, kind, index))
          throw ParseError("unknown identifier '" + t.text + "'", t.offset);
        return Expr::var(kind, index);
      }
      default:
        throw ParseError("expected expression", t.offset);
    }
  }

  void expect(Tok k, const char* msg) {
    if (lex_.peek().kind != k) throw ParseError(msg, lex_.peek().offset);
    lex_.take();
  }

  Lexer lex_;
};

}  // namespace

ExprPtr parse_expression(std::string_view text) {
  if (text.empty()) throw ParseError("empty expression", 0);
  return Parser(text).parse();
}

}  // namespace stabkit
