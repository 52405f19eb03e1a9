#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A Jet holds the Taylor coefficients c_a = (d^a f)(p) / a! of a smooth
// function of `dim` variables around a base point, for every multi-index a
// with |a| <= order. Arithmetic and elementary functions propagate the
// coefficients exactly (up to rounding), so derivatives of any order up to
// kMaxOrder are available without finite-difference noise. Differentiation
// lowers the valid order by one; binary operations keep the smaller order.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace rw {

inline constexpr int kMaxDim = 4;
inline constexpr int kMaxOrder = 4;
// Number of monomials of degree <= kMaxOrder in kMaxDim variables.
inline constexpr int kMaxCoeffs = 70;

using MultiIndex = std::array<std::uint8_t, kMaxDim>;

// Monomial bookkeeping for one dimension. Monomials are stored graded by
// total degree, so truncating to order k is a prefix of the coefficient array.
class JetSpace {
 public:
  struct Term {
    std::uint8_t a, b, c;  // coefficient c += A[a] * B[b]
  };

  static const JetSpace& of(int dim);

  int dim() const noexcept { return dim_; }
  int size(int order) const noexcept { return degree_begin_[order + 1]; }
  int degree(int idx) const noexcept { return degree_[idx]; }
  const MultiIndex& monomial(int idx) const noexcept { return monomials_[idx]; }
  int index(const MultiIndex& alpha) const;
  int unit(int var) const noexcept { return unit_[var]; }

  // Product terms contributing to coefficients of degree <= order.
  std::span<const Term> product_terms(int order) const noexcept {
    return {terms_.data(), static_cast<std::size_t>(term_end_[order])};
  }

  // Index of alpha + e_var, or -1 when that exceeds kMaxOrder.
  int raise(int idx, int var) const noexcept { return raise_[idx][var]; }

 private:
  explicit JetSpace(int dim);

  int dim_;
  std::vector<MultiIndex> monomials_;
  std::vector<int> degree_;
  std::array<int, kMaxOrder + 2> degree_begin_{};
  std::array<int, kMaxDim> unit_{};
  std::vector<Term> terms_;
  std::array<int, kMaxOrder + 1> term_end_{};
  std::vector<std::array<int, kMaxDim>> raise_;
};

class Jet {
 public:
  Jet() = default;

  static Jet constant(const JetSpace& space, int order, double value);
  // The coordinate function x_var expanded around `at`.
  static Jet variable(const JetSpace& space, int order, int var, double at);

  bool valid() const noexcept { return space_ != nullptr; }
  const JetSpace& space() const noexcept { return *space_; }
  int order() const noexcept { return order_; }
  int dim() const noexcept { return space_->dim(); }

  double value() const noexcept { return c_[0]; }
  double coeff(int idx) const noexcept { return c_[idx]; }
  double& coeff(int idx) noexcept { return c_[idx]; }

  // Partial derivative d^alpha f at the base point (alpha! * c_alpha).
  double partial(const MultiIndex& alpha) const;
  double d(int i) const;
  double d(int i, int j) const;

  // Same function with fewer valid orders.
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator+=(double s) noexcept {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(double s) noexcept {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(double s) noexcept;

  friend Jet operator-(const Jet& a);
  friend Jet operator*(const Jet& a, const Jet& b);

 private:
  Jet(const JetSpace* space, int order) : space_(space), order_(order) {}

  const JetSpace* space_ = nullptr;
  int order_ = 0;
  std::array<double, kMaxCoeffs> c_{};

  friend Jet derivative(const Jet& f, int var);
  friend Jet compose(const Jet& x, std::span<const double> taylor);
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator+(Jet a, double s) { return a += s; }
inline Jet operator+(double s, Jet a) { return a += s; }
inline Jet operator-(Jet a, double s) { return a -= s; }
inline Jet operator-(double s, const Jet& a) { return -a + s; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }
Jet operator/(const Jet& a, const Jet& b);
inline Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
Jet operator/(double s, const Jet& a);

Jet derivative(const Jet& f, int var);
// f(x) for f given by its Taylor coefficients at x.value(): taylor[k] = f^(k)/k!.
Jet compose(const Jet& x, std::span<const double> taylor);

Jet reciprocal(const Jet& x);
Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet tan(const Jet& x);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet sqrt(const Jet& x);
Jet sinh(const Jet& x);
Jet cosh(const Jet& x);
Jet tanh(const Jet& x);
Jet pow(const Jet& x, double p);
Jet pow(const Jet& x, int p);

}  // namespace rw
