#pragma once

// Elementwise inner loops of the propagator and the interaction builder.
//
// Every kernel has a portable scalar reference and, where the target supports
// it, an AVX2+FMA variant compiled in its own translation unit. The active
// table is chosen once at startup from CPUID; RBQ_SIMD=scalar forces the
// reference path.

#include <complex>
#include <cstddef>
#include <string_view>

namespace rbq::simd {

using cplx = std::complex<double>;

struct KernelTable {
  std::string_view name;

  /// dst[i] *= src[i]
  void (*cmul)(cplx* dst, const cplx* src, std::size_t n) noexcept;
  /// dst[i] *= c
  void (*cmul_scalar)(cplx* dst, cplx c, std::size_t n) noexcept;
  /// dst[i] = src[i] * c
  void (*cmul_scalar_copy)(cplx* dst, const cplx* src, cplx c, std::size_t n) noexcept;
  /// dst[i] += src[i]
  void (*radd)(double* dst, const double* src, std::size_t n) noexcept;
  /// dst[i] += c
  void (*radd_scalar)(double* dst, double c, std::size_t n) noexcept;
  /// sum |src[i]|^2
  double (*norm_sq)(const cplx* src, std::size_t n) noexcept;
  /// sum a[i] * conj(b[i])
  cplx (*dot_conj)(const cplx* a, const cplx* b, std::size_t n) noexcept;
  /// sum |a[i] - b[i]|^2
  double (*dist_sq)(const cplx* a, const cplx* b, std::size_t n) noexcept;
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the binary or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels() noexcept;

/// Table selected at first use; stable for the lifetime of the process.
const KernelTable& kernels() noexcept;

}  // namespace rbq::simd
