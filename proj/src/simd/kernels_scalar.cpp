#include "rbq/simd/kernels.hpp"

namespace rbq::simd {
namespace {

// Explicit component arithmetic: std::complex operator* carries the Annex G
// inf/nan recovery path, which we never want in the hot loop.
inline cplx mul(cplx a, cplx b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(),
          a.real() * b.imag() + a.imag() * b.real()};
}

void cmul(cplx* dst, const cplx* src, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) dst[i] = mul(dst[i], src[i]);
}

void cmul_scalar(cplx* dst, cplx c, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) dst[i] = mul(dst[i], c);
}

void cmul_scalar_copy(cplx* dst, const cplx* src, cplx c, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) dst[i] = mul(src[i], c);
}

void radd(double* dst, const double* src, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

void radd_scalar(double* dst, double c, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) dst[i] += c;
}

double norm_sq(const cplx* src, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += src[i].real() * src[i].real() + src[i].imag() * src[i].imag();
  return s;
}

cplx dot_conj(const cplx* a, const cplx* b, std::size_t n) noexcept {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
  }
  return {re, im};
}

double dist_sq(const cplx* a, const cplx* b, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dr = a[i].real() - b[i].real();
    const double di = a[i].imag() - b[i].imag();
    s += dr * dr + di * di;
  }
  return s;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{"scalar", cmul, cmul_scalar, cmul_scalar_copy, radd,
                                 radd_scalar, norm_sq, dot_conj, dist_sq};
  return table;
}

}  // namespace rbq::simd
