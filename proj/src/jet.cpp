#include "rw/jet.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace rw {
namespace {

void enumerate(int dim, int var, int remaining, MultiIndex& cur,
               std::vector<MultiIndex>& out) {
  if (var == dim) {
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    cur[var] = static_cast<std::uint8_t>(k);
    enumerate(dim, var + 1, remaining - k, cur, out);
  }
  cur[var] = 0;
}

int total(const MultiIndex& a) {
  int s = 0;
  for (auto v : a) s += v;
  return s;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

JetSpace::JetSpace(int dim) : dim_(dim) {
  MultiIndex cur{};
  std::vector<MultiIndex> all;
  enumerate(dim, 0, kMaxOrder, cur, all);
  std::stable_sort(all.begin(), all.end(), [](const MultiIndex& a, const MultiIndex& b) {
    return total(a) < total(b);
  });
  monomials_ = all;
  degree_.resize(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) degree_[i] = total(all[i]);
  degree_begin_.fill(0);
  for (int k = 0; k <= kMaxOrder + 1; ++k)
    degree_begin_[k] = static_cast<int>(
        std::count_if(degree_.begin(), degree_.end(), [k](int d) { return d < k; }));

  for (int v = 0; v < kMaxDim; ++v) {
    MultiIndex e{};
    if (v < dim) {
      e[v] = 1;
      unit_[v] = index(e);
    } else {
      unit_[v] = -1;
    }
  }

  const int n = static_cast<int>(monomials_.size());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (degree_[a] + degree_[b] > kMaxOrder) continue;
      MultiIndex c{};
      for (int v = 0; v < kMaxDim; ++v)
        c[v] = static_cast<std::uint8_t>(monomials_[a][v] + monomials_[b][v]);
      terms_.push_back({static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                        static_cast<std::uint8_t>(index(c))});
    }
  }
  std::stable_sort(terms_.begin(), terms_.end(), [this](const Term& x, const Term& y) {
    return degree_[x.c] < degree_[y.c];
  });
  for (int k = 0; k <= kMaxOrder; ++k)
    term_end_[k] = static_cast<int>(std::count_if(
        terms_.begin(), terms_.end(), [&](const Term& t) { return degree_[t.c] <= k; }));

  raise_.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int v = 0; v < kMaxDim; ++v) {
      if (v >= dim || degree_[i] == kMaxOrder) {
        raise_[i][v] = -1;
        continue;
      }
      MultiIndex up = monomials_[i];
      ++up[v];
      raise_[i][v] = index(up);
    }
  }
}

const JetSpace& JetSpace::of(int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("jet dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  static const std::array<JetSpace, kMaxDim> spaces{JetSpace(1), JetSpace(2), JetSpace(3),
                                                    JetSpace(4)};
  return spaces[dim - 1];
}

int JetSpace::index(const MultiIndex& alpha) const {
  if (total(alpha) > kMaxOrder) return -1;
  for (int v = dim_; v < kMaxDim; ++v)
    if (alpha[v] != 0) return -1;
  // The tables are tiny; a linear scan keeps this independent of the ordering.
  for (std::size_t i = 0; i < monomials_.size(); ++i)
    if (monomials_[i] == alpha) return static_cast<int>(i);
  return -1;
}

Jet Jet::constant(const JetSpace& space, int order, double value) {
  Jet j(&space, order);
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(const JetSpace& space, int order, int var, double at) {
  Jet j(&space, order);
  j.c_[0] = at;
  if (order >= 1) j.c_[space.unit(var)] = 1.0;
  return j;
}

double Jet::partial(const MultiIndex& alpha) const {
  const int idx = space_->index(alpha);
  if (idx < 0 || space_->degree(idx) > order_)
    throw std::out_of_range("jet derivative beyond valid order");
  double w = 1.0;
  for (auto v : alpha) w *= factorial(v);
  return w * c_[idx];
}

double Jet::d(int i) const {
  MultiIndex a{};
  a[i] = 1;
  return partial(a);
}

double Jet::d(int i, int j) const {
  MultiIndex a{};
  ++a[i];
  ++a[j];
  return partial(a);
}

Jet Jet::truncated(int order) const {
  Jet j = *this;
  if (order < order_) {
    j.order_ = order;
    for (int k = space_->size(order); k < space_->size(order_); ++k) j.c_[k] = 0.0;
  }
  return j;
}

Jet& Jet::operator+=(const Jet& o) {
  assert(space_ == o.space_);
  if (o.order_ < order_) *this = truncated(o.order_);
  const int n = space_->size(order_);
  for (int k = 0; k < n; ++k) c_[k] += o.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  assert(space_ == o.space_);
  if (o.order_ < order_) *this = truncated(o.order_);
  const int n = space_->size(order_);
  for (int k = 0; k < n; ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet& Jet::operator*=(double s) noexcept {
  const int n = space_->size(order_);
  for (int k = 0; k < n; ++k) c_[k] *= s;
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  *this = *this * o;
  return *this;
}

Jet operator-(const Jet& a) {
  Jet r = a;
  r *= -1.0;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  assert(a.space_ == b.space_);
  Jet r(a.space_, std::min(a.order_, b.order_));
  for (const auto& t : a.space_->product_terms(r.order_)) r.c_[t.c] += a.c_[t.a] * b.c_[t.b];
  return r;
}

Jet derivative(const Jet& f, int var) {
  if (f.order_ == 0) throw std::out_of_range("cannot differentiate an order-0 jet");
  Jet r(f.space_, f.order_ - 1);
  const JetSpace& s = *f.space_;
  const int n = s.size(r.order_);
  for (int k = 0; k < n; ++k) {
    const int src = s.raise(k, var);
    r.c_[k] = (s.monomial(k)[var] + 1) * f.c_[src];
  }
  return r;
}

Jet compose(const Jet& x, std::span<const double> taylor) {
  // Horner in h = x - x0, which has no constant term.
  Jet h = x;
  h.c_[0] = 0.0;
  const int K = std::min<int>(x.order_, static_cast<int>(taylor.size()) - 1);
  Jet r = Jet::constant(*x.space_, x.order_, taylor[K]);
  for (int k = K - 1; k >= 0; --k) {
    r = r * h;
    r.c_[0] += taylor[k];
  }
  return r;
}

namespace {

using Taylor = std::array<double, kMaxOrder + 1>;

Taylor scaled(const std::array<double, kMaxOrder + 1>& derivs) {
  Taylor t{};
  for (int k = 0; k <= kMaxOrder; ++k) t[k] = derivs[k] / factorial(k);
  return t;
}

}  // namespace

Jet reciprocal(const Jet& x) {
  const double x0 = x.value();
  if (x0 == 0.0) throw std::domain_error("jet reciprocal of zero");
  Taylor t{};
  double p = 1.0 / x0;
  for (int k = 0; k <= kMaxOrder; ++k) {
    t[k] = (k % 2 == 0 ? p : -p);
    p /= x0;
  }
  return compose(x, t);
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator/(double s, const Jet& a) { return s * reciprocal(a); }

Jet sin(const Jet& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  return compose(x, scaled({s, c, -s, -c, s}));
}

Jet cos(const Jet& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  return compose(x, scaled({c, -s, -c, s, c}));
}

Jet tan(const Jet& x) { return sin(x) / cos(x); }

Jet exp(const Jet& x) {
  const double e = std::exp(x.value());
  return compose(x, scaled({e, e, e, e, e}));
}

Jet log(const Jet& x) {
  const double x0 = x.value();
  if (!(x0 > 0.0)) throw std::domain_error("jet log of a nonpositive value");
  Taylor t{};
  t[0] = std::log(x0);
  double p = 1.0 / x0;
  for (int k = 1; k <= kMaxOrder; ++k) {
    t[k] = (k % 2 == 1 ? p : -p) / k;
    p /= x0;
  }
  return compose(x, t);
}

Jet pow(const Jet& x, double p) {
  const double x0 = x.value();
  if (!(x0 > 0.0)) throw std::domain_error("jet real power of a nonpositive value");
  Taylor t{};
  double binom = 1.0;
  for (int k = 0; k <= kMaxOrder; ++k) {
    t[k] = binom * std::pow(x0, p - k);
    binom *= (p - k) / (k + 1);
  }
  return compose(x, t);
}

Jet pow(const Jet& x, int p) {
  if (p < 0) return reciprocal(pow(x, -p));
  Jet r = Jet::constant(x.space(), x.order(), 1.0);
  Jet base = x;
  while (p > 0) {
    if (p & 1) r = r * base;
    p >>= 1;
    if (p) base = base * base;
  }
  return r;
}

Jet sqrt(const Jet& x) { return pow(x, 0.5); }

Jet sinh(const Jet& x) {
  const double s = std::sinh(x.value()), c = std::cosh(x.value());
  return compose(x, scaled({s, c, s, c, s}));
}

Jet cosh(const Jet& x) {
  const double s = std::sinh(x.value()), c = std::cosh(x.value());
  return compose(x, scaled({c, s, c, s, c}));
}

Jet tanh(const Jet& x) { return sinh(x) / cosh(x); }

}  // namespace rw
