#include "rw/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rw/errors.hpp"

namespace rw {

struct Expr::Node {
  Op op;
  double value = 0.0;
  int var = -1;
  std::vector<Expr> args;
};

Expr Expr::make(Op op, std::vector<Expr> args, double value, int var) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->var = var;
  n->args = std::move(args);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr::Expr(double c) : node_(make(Op::Const, {}, c).node_) {}

Expr Expr::var(int index) { return make(Op::Var, {}, 0.0, index); }

Expr::Op Expr::op() const noexcept { return node_->op; }

double Expr::constant_value() const {
  if (node_->op != Op::Const) throw std::logic_error("not a constant expression node");
  return node_->value;
}

int Expr::var_index() const {
  if (node_->op != Op::Var) throw std::logic_error("not a variable expression node");
  return node_->var;
}

namespace {

bool is_literal(const Expr& e, double v) {
  return e.op() == Expr::Op::Const && e.constant_value() == v;
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  if (is_literal(a, 0.0)) return b;
  if (is_literal(b, 0.0)) return a;
  return Expr::make(Expr::Op::Add, {a, b});
}

Expr operator-(const Expr& a, const Expr& b) {
  if (is_literal(b, 0.0)) return a;
  if (is_literal(a, 0.0)) return -b;
  return Expr::make(Expr::Op::Sub, {a, b});
}

Expr operator*(const Expr& a, const Expr& b) {
  if (is_literal(a, 0.0) || is_literal(b, 0.0)) return Expr(0.0);
  if (is_literal(a, 1.0)) return b;
  if (is_literal(b, 1.0)) return a;
  return Expr::make(Expr::Op::Mul, {a, b});
}

Expr operator/(const Expr& a, const Expr& b) {
  if (is_literal(a, 0.0)) return Expr(0.0);
  if (is_literal(b, 1.0)) return a;
  return Expr::make(Expr::Op::Div, {a, b});
}

Expr operator-(const Expr& a) {
  if (a.op() == Expr::Op::Const) return Expr(-a.constant_value());
  return Expr::make(Expr::Op::Neg, {a});
}

Expr pow(const Expr& a, const Expr& b) {
  if (b.op() == Expr::Op::Const) {
    const double p = b.constant_value();
    if (p == std::round(p) && std::abs(p) <= 64) return pow(a, static_cast<int>(p));
  }
  return Expr::make(Expr::Op::Pow, {a, b});
}

Expr pow(const Expr& a, int k) {
  if (k == 0) return Expr(1.0);
  if (k == 1) return a;
  return Expr::make(Expr::Op::PowInt, {a}, static_cast<double>(k));
}

#define RW_UNARY(fn, OP) \
  Expr fn(const Expr& a) { return Expr::make(Expr::Op::OP, {a}); }
RW_UNARY(sin, Sin)
RW_UNARY(cos, Cos)
RW_UNARY(tan, Tan)
RW_UNARY(exp, Exp)
RW_UNARY(log, Log)
RW_UNARY(sqrt, Sqrt)
RW_UNARY(sinh, Sinh)
RW_UNARY(cosh, Cosh)
RW_UNARY(tanh, Tanh)
#undef RW_UNARY

template <class T, class Lift>
T Expr::eval_impl(std::span<const T> x, const Lift& lift) const {
  using std::cos, std::cosh, std::exp, std::log, std::pow, std::sin, std::sinh, std::sqrt,
      std::tan, std::tanh;
  const Node& n = *node_;
  auto arg = [&](int i) { return n.args[i].eval_impl<T>(x, lift); };
  switch (n.op) {
    case Op::Const: return lift(n.value);
    case Op::Var:
      if (n.var < 0 || n.var >= static_cast<int>(x.size()))
        throw DimensionMismatch("expression references coordinate " + std::to_string(n.var) +
                                " but only " + std::to_string(x.size()) + " are bound");
      return x[n.var];
    case Op::Add: return arg(0) + arg(1);
    case Op::Sub: return arg(0) - arg(1);
    case Op::Mul: return arg(0) * arg(1);
    case Op::Div: return arg(0) / arg(1);
    case Op::Neg: return -arg(0);
    case Op::PowInt: {
      if constexpr (std::is_same_v<T, double>) {
        return std::pow(arg(0), static_cast<int>(n.value));
      } else {
        return rw::pow(arg(0), static_cast<int>(n.value));
      }
    }
    case Op::Pow: {
      const Expr& e = n.args[1];
      if (e.op() == Op::Const) {
        if constexpr (std::is_same_v<T, double>) {
          return std::pow(arg(0), e.constant_value());
        } else {
          return rw::pow(arg(0), e.constant_value());
        }
      }
      return exp(arg(1) * log(arg(0)));
    }
    case Op::Sin: return sin(arg(0));
    case Op::Cos: return cos(arg(0));
    case Op::Tan: return tan(arg(0));
    case Op::Exp: return exp(arg(0));
    case Op::Log: return log(arg(0));
    case Op::Sqrt: return sqrt(arg(0));
    case Op::Sinh: return sinh(arg(0));
    case Op::Cosh: return cosh(arg(0));
    case Op::Tanh: return tanh(arg(0));
  }
  throw std::logic_error("unhandled expression op");
}

double Expr::eval(std::span<const double> x) const {
  return eval_impl<double>(x, [](double v) { return v; });
}

Jet Expr::eval(std::span<const Jet> x) const {
  if (x.empty()) throw DimensionMismatch("jet evaluation needs at least one coordinate");
  const JetSpace& space = x[0].space();
  const int order = x[0].order();
  return eval_impl<Jet>(x, [&](double v) { return Jet::constant(space, order, v); });
}

Expr Expr::diff(int v) const {
  const Node& n = *node_;
  auto a = [&](int i) -> const Expr& { return n.args[i]; };
  auto da = [&](int i) { return n.args[i].diff(v); };
  switch (n.op) {
    case Op::Const: return Expr(0.0);
    case Op::Var: return Expr(n.var == v ? 1.0 : 0.0);
    case Op::Add: return da(0) + da(1);
    case Op::Sub: return da(0) - da(1);
    case Op::Mul: return da(0) * a(1) + a(0) * da(1);
    case Op::Div: return (da(0) * a(1) - a(0) * da(1)) / pow(a(1), 2);
    case Op::Neg: return -da(0);
    case Op::PowInt: {
      const int k = static_cast<int>(n.value);
      return Expr(static_cast<double>(k)) * pow(a(0), k - 1) * da(0);
    }
    case Op::Pow: {
      if (a(1).op() == Op::Const) {
        const double p = a(1).constant_value();
        return Expr(p) * pow(a(0), Expr(p - 1.0)) * da(0);
      }
      return *this * (da(1) * log(a(0)) + a(1) * da(0) / a(0));
    }
    case Op::Sin: return cos(a(0)) * da(0);
    case Op::Cos: return -(sin(a(0)) * da(0));
    case Op::Tan: return da(0) / pow(cos(a(0)), 2);
    case Op::Exp: return *this * da(0);
    case Op::Log: return da(0) / a(0);
    case Op::Sqrt: return da(0) / (Expr(2.0) * *this);
    case Op::Sinh: return cosh(a(0)) * da(0);
    case Op::Cosh: return sinh(a(0)) * da(0);
    case Op::Tanh: return da(0) / pow(cosh(a(0)), 2);
  }
  throw std::logic_error("unhandled expression op");
}

bool Expr::is_constant() const { return max_var() < 0; }

int Expr::max_var() const {
  const Node& n = *node_;
  if (n.op == Op::Var) return n.var;
  int m = -1;
  for (const auto& c : n.args) m = std::max(m, c.max_var());
  return m;
}

std::string Expr::str(std::span<const std::string> names) const {
  const Node& n = *node_;
  auto s = [&](int i) { return n.args[i].str(names); };
  std::ostringstream os;
  os.precision(17);
  switch (n.op) {
    case Op::Const: os << n.value; break;
    case Op::Var:
      if (n.var < static_cast<int>(names.size()))
        os << names[n.var];
      else
        os << "x" << n.var;
      break;
    case Op::Add: os << "(" << s(0) << " + " << s(1) << ")"; break;
    case Op::Sub: os << "(" << s(0) << " - " << s(1) << ")"; break;
    case Op::Mul: os << "(" << s(0) << " * " << s(1) << ")"; break;
    case Op::Div: os << "(" << s(0) << " / " << s(1) << ")"; break;
    case Op::Neg: os << "(-" << s(0) << ")"; break;
    case Op::PowInt: os << "(" << s(0) << ")^" << static_cast<int>(n.value); break;
    case Op::Pow: os << "(" << s(0) << ")^(" << s(1) << ")"; break;
    case Op::Sin: os << "sin(" << s(0) << ")"; break;
    case Op::Cos: os << "cos(" << s(0) << ")"; break;
    case Op::Tan: os << "tan(" << s(0) << ")"; break;
    case Op::Exp: os << "exp(" << s(0) << ")"; break;
    case Op::Log: os << "log(" << s(0) << ")"; break;
    case Op::Sqrt: os << "sqrt(" << s(0) << ")"; break;
    case Op::Sinh: os << "sinh(" << s(0) << ")"; break;
    case Op::Cosh: os << "cosh(" << s(0) << ")"; break;
    case Op::Tanh: os << "tanh(" << s(0) << ")"; break;
  }
  return os.str();
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> names)
      : text_(text), names_(names) {}

  Expr parse() {
    Expr e = sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("expression '" + std::string(text_) + "': " + msg + " at column " +
                     std::to_string(pos_ + 1));
  }

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

  Expr sum() {
    Expr e = product();
    for (;;) {
      if (accept('+'))
        e = e + product();
      else if (accept('-'))
        e = e - product();
      else
        return e;
    }
  }

  Expr product() {
    Expr e = unary();
    for (;;) {
      if (accept('*'))
        e = e * unary();
      else if (accept('/'))
        e = e / unary();
      else
        return e;
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  // Right associative; binds tighter than unary minus on its left.
  Expr power() {
    Expr base = atom();
    if (accept('^')) return pow(base, unary());
    return base;
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      }
    }
    const std::string tok(text_.substr(start, pos_ - start));
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) fail("malformed number '" + tok + "'");
      return Expr(v);
    } catch (const std::logic_error&) {
      fail("malformed number '" + tok + "'");
    }
  }

  Expr name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string id(text_.substr(start, pos_ - start));
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == id) return Expr::var(static_cast<int>(i));
    if (id == "pi") return Expr(M_PI);
    if (id == "e") return Expr(M_E);
    using Fn = Expr (*)(const Expr&);
    static const std::pair<const char*, Fn> fns[] = {
        {"sin", [](const Expr& a) { return sin(a); }},
        {"cos", [](const Expr& a) { return cos(a); }},
        {"tan", [](const Expr& a) { return tan(a); }},
        {"exp", [](const Expr& a) { return exp(a); }},
        {"log", [](const Expr& a) { return log(a); }},
        {"sqrt", [](const Expr& a) { return sqrt(a); }},
        {"sinh", [](const Expr& a) { return sinh(a); }},
        {"cosh", [](const Expr& a) { return cosh(a); }},
        {"tanh", [](const Expr& a) { return tanh(a); }},
    };
    for (const auto& [fname, fn] : fns) {
      if (id == fname) {
        if (!accept('(')) fail("expected '(' after " + id);
        Expr a = sum();
        if (!accept(')')) fail("expected ')'");
        return fn(a);
      }
    }
    fail("unknown identifier '" + id + "'");
  }

  std::string_view text_;
  std::span<const std::string> names_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, std::span<const std::string> coord_names) {
  return Parser(text, coord_names).parse();
}

}  // namespace rw
