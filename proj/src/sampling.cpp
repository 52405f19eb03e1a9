#include "rw/sampling.hpp"

#include <cmath>
#include <random>

namespace rw {
namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13};

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

std::vector<std::vector<double>> sample_points(const Box& box, int count, std::uint64_t seed) {
  const int n = box.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(n);
  for (auto& s : shift) s = unit(rng);
  std::vector<std::vector<double>> pts(count, std::vector<double>(n));
  for (int k = 0; k < count; ++k)
    for (int v = 0; v < n; ++v) {
      double u = radical_inverse(static_cast<std::uint64_t>(k) + 1, kPrimes[v]) + shift[v];
      u -= std::floor(u);
      pts[k][v] = box.lo[v] + u * (box.hi[v] - box.lo[v]);
    }
  return pts;
}

}  // namespace rw
