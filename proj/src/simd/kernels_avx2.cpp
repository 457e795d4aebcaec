// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include "rbq/simd/kernels.hpp"

#if defined(RBQ_HAVE_AVX2)
#include <immintrin.h>

namespace rbq::simd {
namespace {

// Two complex doubles per __m256d, interleaved (re0, im0, re1, im1).
inline __m256d cmul_pd(__m256d a, __m256d b) noexcept {
  const __m256d b_re = _mm256_movedup_pd(b);        // br br
  const __m256d b_im = _mm256_permute_pd(b, 0xF);   // bi bi
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);   // ai ar
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

inline double hsum(__m256d v) noexcept {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void cmul(cplx* dst, const cplx* src, std::size_t n) noexcept {
  auto* d = reinterpret_cast<double*>(dst);
  const auto* s = reinterpret_cast<const double*>(src);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(d + 2 * i, cmul_pd(_mm256_loadu_pd(d + 2 * i), _mm256_loadu_pd(s + 2 * i)));
  }
  for (; i < n; ++i) {
    const cplx a = dst[i], b = src[i];
    dst[i] = {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
  }
}

void cmul_scalar_copy(cplx* dst, const cplx* src, cplx c, std::size_t n) noexcept {
  auto* d = reinterpret_cast<double*>(dst);
  const auto* s = reinterpret_cast<const double*>(src);
  const __m256d cv = _mm256_setr_pd(c.real(), c.imag(), c.real(), c.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(d + 2 * i, cmul_pd(_mm256_loadu_pd(s + 2 * i), cv));
  }
  for (; i < n; ++i) {
    const cplx a = src[i];
    dst[i] = {a.real() * c.real() - a.imag() * c.imag(), a.real() * c.imag() + a.imag() * c.real()};
  }
}

void cmul_scalar(cplx* dst, cplx c, std::size_t n) noexcept { cmul_scalar_copy(dst, dst, c, n); }

void radd(double* dst, const double* src, std::size_t n) noexcept {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(src + i)));
  }
  for (; i < n; ++i) dst[i] += src[i];
}

void radd_scalar(double* dst, double c, std::size_t n) noexcept {
  const __m256d cv = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), cv));
  }
  for (; i < n; ++i) dst[i] += c;
}

double norm_sq(const cplx* src, std::size_t n) noexcept {
  const auto* s = reinterpret_cast<const double*>(src);
  const std::size_t m = 2 * n;
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    const __m256d a = _mm256_loadu_pd(s + i);
    const __m256d b = _mm256_loadu_pd(s + i + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  double total = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < m; ++i) total += s[i] * s[i];
  return total;
}

cplx dot_conj(const cplx* a, const cplx* b, std::size_t n) noexcept {
  const auto* pa = reinterpret_cast<const double*>(a);
  const auto* pb = reinterpret_cast<const double*>(b);
  // re: a.re*b.re + a.im*b.im ; im: a.im*b.re - a.re*b.im
  __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    // (a.im*b.re, a.re*b.im) per lane pair; subtract later
    acc_im = _mm256_fmadd_pd(_mm256_permute_pd(va, 0x5), vb, acc_im);
  }
  alignas(32) double r[4], m[4];
  _mm256_store_pd(r, acc_re);
  _mm256_store_pd(m, acc_im);
  double re = r[0] + r[1] + r[2] + r[3];
  double im = (m[0] - m[1]) + (m[2] - m[3]);
  for (; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
  }
  return {re, im};
}

double dist_sq(const cplx* a, const cplx* b, std::size_t n) noexcept {
  const auto* pa = reinterpret_cast<const double*>(a);
  const auto* pb = reinterpret_cast<const double*>(b);
  const std::size_t m = 2 * n;
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double total = hsum(acc);
  for (; i < m; ++i) total += (pa[i] - pb[i]) * (pa[i] - pb[i]);
  return total;
}

}  // namespace

const KernelTable* avx2_table_impl() noexcept {
  static const KernelTable table{"avx2", cmul, cmul_scalar, cmul_scalar_copy, radd,
                                 radd_scalar, norm_sq, dot_conj, dist_sq};
  return &table;
}

}  // namespace rbq::simd

#else

namespace rbq::simd {
const KernelTable* avx2_table_impl() noexcept { return nullptr; }
}  // namespace rbq::simd

#endif
