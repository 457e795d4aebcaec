#pragma once

// Traversal of an M^N row-major tensor by the (axis l, axis n) coordinates of
// one particle pair. Shared by the interaction builder and the phase builder.

#include <cstddef>

namespace rbq::detail {

inline std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

/// Calls f(base, il, inner) for every run in which axis l is fixed to il and
/// axis n sweeps 0..M-1; the run covers [base, base + M*inner) with axis n
/// advancing every `inner` elements. Requires l < n.
template <class F>
void visit_pair_runs(std::size_t particles, std::size_t m, std::size_t l, std::size_t n, F&& f) {
  const std::size_t inner = ipow(m, particles - 1 - n);
  const std::size_t mid = ipow(m, n - l - 1);
  const std::size_t outer = ipow(m, l);
  const std::size_t stride_l = ipow(m, particles - 1 - l);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t il = 0; il < m; ++il) {
      for (std::size_t mi = 0; mi < mid; ++mi) {
        f(o * m * stride_l + il * stride_l + mi * m * inner, il, inner);
      }
    }
  }
}

}  // namespace rbq::detail
