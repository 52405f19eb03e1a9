#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2/FMA variant.
// The active table is chosen once at first use from CPUID; setting the
// environment variable RW_FORCE_SCALAR pins the scalar reference.

#include <cstddef>

namespace rw::kernels {

struct Table {
  const char* name;
  // Pairwise (blocked) summation; result independent of thread count.
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out[i] = eigenvalue polynomial / factored form on tuple i.
  void (*eigen_poly)(const double* n, const double* lam, const double* R, const double* S,
                    double* out, std::size_t count);
  void (*eigen_factored)(const double* n, const double* lam, const double* Rt, const double* St,
                        double* out, std::size_t count);
  // Interleaved complex values c[2k], c[2k+1] scaled by real m[k].
  void (*scale_complex)(double* c, const double* m, std::size_t count);
};

const Table& scalar_table() noexcept;
// nullptr when the CPU lacks AVX2 or FMA.
const Table* avx2_table() noexcept;
const Table& active() noexcept;

}  // namespace rw::kernels
