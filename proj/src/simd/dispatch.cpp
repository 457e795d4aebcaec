#include <cstdlib>
#include <string_view>

#include "rbq/simd/kernels.hpp"

namespace rbq::simd {

const KernelTable* avx2_table_impl() noexcept;

const KernelTable* avx2_kernels() noexcept {
#if defined(__x86_64__) || defined(_M_X64)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& kernels() noexcept {
  static const KernelTable* active = [] {
    const char* env = std::getenv("RBQ_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return &scalar_kernels();
    const KernelTable* avx2 = avx2_kernels();
    return avx2 != nullptr ? avx2 : &scalar_kernels();
  }();
  return *active;
}

}  // namespace rbq::simd
