#include "rw/kernels/kernels.hpp"

namespace rw::kernels {
namespace {

constexpr std::size_t kBlock = 64;

double sum_block(const double* x, std::size_t n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += x[i];
    a1 += x[i + 1];
    a2 += x[i + 2];
    a3 += x[i + 3];
  }
  for (; i < n; ++i) a0 += x[i];
  return (a0 + a1) + (a2 + a3);
}

double sum(const double* x, std::size_t n) {
  if (n <= kBlock) return sum_block(x, n);
  const std::size_t h = (n / 2 + kBlock - 1) / kBlock * kBlock;
  return sum(x, h) + sum(x + h, n - h);
}

double dot_block(const double* x, const double* y, std::size_t n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += x[i] * y[i];
    a1 += x[i + 1] * y[i + 1];
    a2 += x[i + 2] * y[i + 2];
    a3 += x[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) a0 += x[i] * y[i];
  return (a0 + a1) + (a2 + a3);
}

double dot(const double* x, const double* y, std::size_t n) {
  if (n <= kBlock) return dot_block(x, y, n);
  const std::size_t h = (n / 2 + kBlock - 1) / kBlock * kBlock;
  return dot(x, y, h) + dot(x + h, y + h, n - h);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void eigen_poly(const double* nn, const double* lam, const double* RR, const double* SS,
               double* out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    const double n = nn[i], l = lam[i], R = RR[i], S = SS[i];
    out[i] = R * R * R - n * l * R * R + 2 * (n - 1) * l * l * R - (n - 1) * S * R +
             (n - 1) * (n - 2) * l * S;
  }
}

void eigen_factored(const double* nn, const double* lam, const double* Rt, const double* St,
                   double* out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    const double n = nn[i], l = lam[i], r = Rt[i], s = St[i];
    out[i] = (n - 2) * l * l * ((n - 1) * l - r) + ((n - 3) * l - r) * ((n - 1) * s - r * r);
  }
}

void scale_complex(double* c, const double* m, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    c[2 * k] *= m[k];
    c[2 * k + 1] *= m[k];
  }
}

}  // namespace

const Table& scalar_table() noexcept {
  static const Table t{"scalar", sum, dot, axpy, eigen_poly, eigen_factored, scale_complex};
  return t;
}

}  // namespace rw::kernels
