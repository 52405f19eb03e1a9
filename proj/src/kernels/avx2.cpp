// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include "rw/kernels/kernels.hpp"

namespace rw::kernels {
namespace {

constexpr std::size_t kBlock = 64;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v), hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_block(const double* x, std::size_t n) {
  __m256d a = _mm256_setzero_pd(), b = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a = _mm256_add_pd(a, _mm256_loadu_pd(x + i));
    b = _mm256_add_pd(b, _mm256_loadu_pd(x + i + 4));
  }
  double r = hsum(_mm256_add_pd(a, b));
  for (; i < n; ++i) r += x[i];
  return r;
}

double sum(const double* x, std::size_t n) {
  if (n <= kBlock) return sum_block(x, n);
  const std::size_t h = (n / 2 + kBlock - 1) / kBlock * kBlock;
  return sum(x, h) + sum(x + h, n - h);
}

double dot_block(const double* x, const double* y, std::size_t n) {
  __m256d a = _mm256_setzero_pd(), b = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a);
    b = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), b);
  }
  double r = hsum(_mm256_add_pd(a, b));
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

double dot(const double* x, const double* y, std::size_t n) {
  if (n <= kBlock) return dot_block(x, y, n);
  const std::size_t h = (n / 2 + kBlock - 1) / kBlock * kBlock;
  return dot(x, y, h) + dot(x + h, y + h, n - h);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void eigen_poly(const double* nn, const double* lam, const double* RR, const double* SS,
               double* out, std::size_t count) {
  const __m256d one = _mm256_set1_pd(1.0), two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d n = _mm256_loadu_pd(nn + i), l = _mm256_loadu_pd(lam + i);
    const __m256d R = _mm256_loadu_pd(RR + i), S = _mm256_loadu_pd(SS + i);
    const __m256d n1 = _mm256_sub_pd(n, one), n2 = _mm256_sub_pd(n, two);
    const __m256d R2 = _mm256_mul_pd(R, R);
    // R^3 - n l R^2 + 2(n-1) l^2 R - (n-1) S R + (n-1)(n-2) l S
    __m256d acc = _mm256_mul_pd(R2, R);
    acc = _mm256_fnmadd_pd(_mm256_mul_pd(n, l), R2, acc);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_mul_pd(two, n1), _mm256_mul_pd(l, l)), R, acc);
    acc = _mm256_fnmadd_pd(_mm256_mul_pd(n1, S), R, acc);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(n1, n2), _mm256_mul_pd(l, S), acc);
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < count; ++i) {
    const double n = nn[i], l = lam[i], R = RR[i], S = SS[i];
    out[i] = R * R * R - n * l * R * R + 2 * (n - 1) * l * l * R - (n - 1) * S * R +
             (n - 1) * (n - 2) * l * S;
  }
}

void eigen_factored(const double* nn, const double* lam, const double* Rt, const double* St,
                   double* out, std::size_t count) {
  const __m256d one = _mm256_set1_pd(1.0), two = _mm256_set1_pd(2.0),
                three = _mm256_set1_pd(3.0);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d n = _mm256_loadu_pd(nn + i), l = _mm256_loadu_pd(lam + i);
    const __m256d r = _mm256_loadu_pd(Rt + i), s = _mm256_loadu_pd(St + i);
    const __m256d n1 = _mm256_sub_pd(n, one);
    // (n-2) l^2 ((n-1) l - r) + ((n-3) l - r)((n-1) s - r^2)
    const __m256d a = _mm256_mul_pd(_mm256_mul_pd(_mm256_sub_pd(n, two), l), l);
    const __m256d b = _mm256_fmsub_pd(n1, l, r);
    const __m256d c = _mm256_fmsub_pd(_mm256_sub_pd(n, three), l, r);
    const __m256d d = _mm256_fnmadd_pd(r, r, _mm256_mul_pd(n1, s));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(c, d, _mm256_mul_pd(a, b)));
  }
  for (; i < count; ++i) {
    const double n = nn[i], l = lam[i], r = Rt[i], s = St[i];
    out[i] = (n - 2) * l * l * ((n - 1) * l - r) + ((n - 3) * l - r) * ((n - 1) * s - r * r);
  }
}

void scale_complex(double* c, const double* m, std::size_t count) {
  std::size_t k = 0;
  for (; k + 2 <= count; k += 2) {
    // [m0 m0 m1 m1] against [re0 im0 re1 im1]
    const __m128d mm = _mm_loadu_pd(m + k);
    const __m256d v = _mm256_permute4x64_pd(_mm256_castpd128_pd256(mm), 0x50);
    _mm256_storeu_pd(c + 2 * k, _mm256_mul_pd(_mm256_loadu_pd(c + 2 * k), v));
  }
  for (; k < count; ++k) {
    c[2 * k] *= m[k];
    c[2 * k + 1] *= m[k];
  }
}

}  // namespace

const Table& avx2_table_impl() noexcept {
  static const Table t{"avx2", sum, dot, axpy, eigen_poly, eigen_factored, scale_complex};
  return t;
}

}  // namespace rw::kernels
