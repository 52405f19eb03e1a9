#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rw/kernels/kernels.hpp"

using namespace rw::kernels;

namespace {

std::vector<double> randv(std::size_t n, std::uint64_t seed, double lo = -10, double hi = 10) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    simd_ = avx2_table();
    if (!simd_) GTEST_SKIP() << "no AVX2/FMA on this CPU";
  }
  const Table& ref_ = scalar_table();
  const Table* simd_ = nullptr;
};

const std::size_t kSizes[] = {0, 1, 3, 4, 7, 63, 64, 65, 129, 1000, 4099};

}  // namespace

TEST(Kernels, ActiveIsOneOfTheTables) {
  const Table& a = active();
  EXPECT_TRUE(&a == &scalar_table() || &a == avx2_table());
}

TEST(Kernels, ScalarReferenceValues) {
  const double x[] = {1, 2, 3, 4, 5};
  const double y[] = {1, 0, -1, 0, 2};
  EXPECT_EQ(scalar_table().sum(x, 5), 15.0);
  EXPECT_EQ(scalar_table().dot(x, y, 5), 8.0);
  double z[] = {1, 1, 1, 1, 1};
  scalar_table().axpy(2.0, x, z, 5);
  EXPECT_EQ(z[4], 11.0);
  const double n = 3, lam = 1, R = 6, S = 14, Rt = 5, St = 13;
  double out = 0;
  scalar_table().eigen_poly(&n, &lam, &R, &S, &out, 1);
  EXPECT_EQ(out, -8.0);
  scalar_table().eigen_factored(&n, &lam, &Rt, &St, &out, 1);
  EXPECT_EQ(out, -8.0);
}

TEST_F(KernelEquivalence, Reductions) {
  for (std::size_t n : kSizes) {
    const auto x = randv(n, 1 + n), y = randv(n, 2 + n);
    const double s = ref_.sum(x.data(), n), d = ref_.dot(x.data(), y.data(), n);
    double mag = 0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]) + std::abs(x[i]);
    EXPECT_NEAR(simd_->sum(x.data(), n), s, 1e-14 * (1 + mag)) << n;
    EXPECT_NEAR(simd_->dot(x.data(), y.data(), n), d, 1e-14 * (1 + mag)) << n;
  }
}

TEST_F(KernelEquivalence, Axpy) {
  for (std::size_t n : kSizes) {
    const auto x = randv(n, 3 + n);
    auto a = randv(n, 4 + n), b = a;
    ref_.axpy(0.37, x.data(), a.data(), n);
    simd_->axpy(0.37, x.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(a[i], b[i], 1e-14 * (1 + std::abs(a[i])));
  }
}

TEST_F(KernelEquivalence, EigenPolynomialForms) {
  for (std::size_t n : kSizes) {
    auto dim = randv(n, 5 + n, 3, 6);
    for (auto& d : dim) d = std::floor(d);
    const auto lam = randv(n, 6 + n), R = randv(n, 7 + n, -30, 30), S = randv(n, 8 + n, 0, 300);
    std::vector<double> a(n), b(n);
    ref_.eigen_poly(dim.data(), lam.data(), R.data(), S.data(), a.data(), n);
    simd_->eigen_poly(dim.data(), lam.data(), R.data(), S.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(a[i], b[i], 1e-11 * (1 + std::abs(a[i])));
    ref_.eigen_factored(dim.data(), lam.data(), R.data(), S.data(), a.data(), n);
    simd_->eigen_factored(dim.data(), lam.data(), R.data(), S.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(a[i], b[i], 1e-11 * (1 + std::abs(a[i])));
  }
}

TEST_F(KernelEquivalence, ScaleComplex) {
  for (std::size_t n : kSizes) {
    const auto m = randv(n, 9 + n);
    auto a = randv(2 * n, 10 + n), b = a;
    ref_.scale_complex(a.data(), m.data(), n);
    simd_->scale_complex(b.data(), m.data(), n);
    for (std::size_t i = 0; i < 2 * n; ++i) EXPECT_EQ(a[i], b[i]);
  }
}
