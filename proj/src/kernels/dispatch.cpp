#include <cstdlib>

#include "rw/kernels/kernels.hpp"

namespace rw::kernels {

const Table& avx2_table_impl() noexcept;

const Table* avx2_table() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const Table& active() noexcept {
  static const Table* t = [] {
    const char* force = std::getenv("RW_FORCE_SCALAR");
    if (force && *force && *force != '0') return &scalar_table();
    const Table* v = avx2_table();
    return v ? v : &scalar_table();
  }();
  return *t;
}

}  // namespace rw::kernels
