#pragma once

// Closed-form scalar expressions over chart coordinates.
//
// Catalog metrics, potentials and user expression files all share this
// representation, so one definition evaluates in plain doubles (for
// finite-difference cross-checks and geodesic right-hand sides) and in jets
// (for exact derivatives).

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rw/jet.hpp"

namespace rw {

class Expr {
 public:
  enum class Op {
    Const, Var, Add, Sub, Mul, Div, Neg, Pow, PowInt,
    Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Tanh
  };

  Expr() : Expr(0.0) {}
  Expr(double c);  // NOLINT(google-explicit-constructor): literals read naturally
  static Expr var(int index);

  Op op() const noexcept;
  double constant_value() const;  // Const only
  int var_index() const;          // Var only

  double eval(std::span<const double> x) const;
  Jet eval(std::span<const Jet> x) const;

  // d/dx_var, unsimplified apart from folding of literal zeros and ones.
  Expr diff(int var) const;

  bool is_constant() const;  // contains no Var node
  int max_var() const;       // -1 when constant
  std::string str(std::span<const std::string> names = {}) const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& a, const Expr& b);
  friend Expr pow(const Expr& a, int k);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr tan(const Expr& a);
  friend Expr exp(const Expr& a);
  friend Expr log(const Expr& a);
  friend Expr sqrt(const Expr& a);
  friend Expr sinh(const Expr& a);
  friend Expr cosh(const Expr& a);
  friend Expr tanh(const Expr& a);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Op op, std::vector<Expr> args, double value = 0.0, int var = -1);

  template <class T, class Lift>
  T eval_impl(std::span<const T> x, const Lift& lift) const;

  std::shared_ptr<const Node> node_;
};

// Recursive-descent parser: + - * / ^, unary minus, parentheses, numbers,
// the constants pi and e, coordinate names, and the functions
// sin cos tan exp log sqrt sinh cosh tanh.
Expr parse_expr(std::string_view text, std::span<const std::string> coord_names);

}  // namespace rw
