#pragma once

// Dense component blocks with declared slot variance.
//
// Storage is row-major with every slot of extent `dim`; no symmetry
// compression. The same container carries plain values (TensorValue), jets
// of a tensor field around a point (JetTensor) and closed-form component
// expressions (ExprTensor).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "rw/errors.hpp"

namespace rw {

enum class Valence : std::uint8_t { Up, Down };

template <class T>
class BasicTensor {
 public:
  BasicTensor() = default;
  BasicTensor(int dim, std::vector<Valence> valence, const T& fill = T())
      : dim_(dim), valence_(std::move(valence)) {
    if (dim < 1) throw DimensionMismatch("tensor dimension must be positive");
    std::size_t n = 1;
    for (std::size_t i = 0; i < valence_.size(); ++i) n *= static_cast<std::size_t>(dim);
    c_.assign(n, fill);
  }

  static BasicTensor scalar(int dim, const T& v) { return BasicTensor(dim, {}, v); }

  int dim() const noexcept { return dim_; }
  int rank() const noexcept { return static_cast<int>(valence_.size()); }
  const std::vector<Valence>& valence() const noexcept { return valence_; }
  Valence valence(int slot) const { return valence_.at(slot); }
  std::size_t size() const noexcept { return c_.size(); }

  std::size_t flat(std::initializer_list<int> idx) const {
    if (static_cast<int>(idx.size()) != rank())
      throw ShapeMismatch("index count " + std::to_string(idx.size()) + " does not match rank " +
                          std::to_string(rank()));
    std::size_t k = 0;
    for (int i : idx) k = k * dim_ + static_cast<std::size_t>(i);
    return k;
  }

  template <class... I>
  T& operator()(I... idx) {
    return c_[flat({static_cast<int>(idx)...})];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    return c_[flat({static_cast<int>(idx)...})];
  }

  T& operator[](std::size_t k) { return c_[k]; }
  const T& operator[](std::size_t k) const { return c_[k]; }

  std::vector<T>& data() noexcept { return c_; }
  const std::vector<T>& data() const noexcept { return c_; }

  // Multi-index of flat position k, slot 0 first.
  std::vector<int> unflat(std::size_t k) const {
    std::vector<int> idx(valence_.size());
    for (int s = rank() - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(k % dim_);
      k /= dim_;
    }
    return idx;
  }

  std::size_t flat(const std::vector<int>& idx) const {
    std::size_t k = 0;
    for (int i : idx) k = k * dim_ + static_cast<std::size_t>(i);
    return k;
  }

  bool same_shape(const BasicTensor& o) const noexcept {
    return dim_ == o.dim_ && valence_ == o.valence_;
  }

  template <class F>
  auto map(F&& f) const {
    using U = decltype(f(c_[0]));
    BasicTensor<U> r(dim_, valence_);
    for (std::size_t k = 0; k < c_.size(); ++k) r[k] = f(c_[k]);
    return r;
  }

 private:
  int dim_ = 0;
  std::vector<Valence> valence_;
  std::vector<T> c_;
};

using TensorValue = BasicTensor<double>;

inline std::vector<Valence> downs(int k) { return std::vector<Valence>(k, Valence::Down); }

inline double max_abs(const TensorValue& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

inline TensorValue operator-(const TensorValue& a, const TensorValue& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("tensor shapes differ");
  TensorValue r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] -= b[k];
  return r;
}

inline TensorValue operator+(const TensorValue& a, const TensorValue& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("tensor shapes differ");
  TensorValue r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += b[k];
  return r;
}

inline TensorValue operator*(double s, const TensorValue& a) {
  TensorValue r = a;
  for (auto& v : r.data()) v *= s;
  return r;
}

// True when swapping slots a and b leaves the block unchanged to `rel_tol`.
inline bool symmetric_in(const TensorValue& t, int a, int b, double rel_tol) {
  const double scale = std::max(1.0, max_abs(t));
  for (std::size_t k = 0; k < t.size(); ++k) {
    auto idx = t.unflat(k);
    std::swap(idx[a], idx[b]);
    if (std::abs(t[k] - t[t.flat(idx)]) > rel_tol * scale) return false;
  }
  return true;
}

}  // namespace rw
