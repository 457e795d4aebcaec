#pragma once

// Discrete Wigner map on the periodic grid and its exact bilinear adjoint.
// Shared by grid.cpp (Weyl quantization) and wigner.cpp.

#include "rbq/grid.hpp"

namespace rbq::detail {

/// Real circulant S with (S f)_j = trigonometric interpolant of f at x_j + dx/2.
/// The Nyquist mode is interpolated by its cosine part, which is zero here.
const CMatrix& half_shift(const GridSpec& g);

/// W[r](x_j, xi_k) for an arbitrary kernel r (real whenever r is Hermitian).
CMatrix wigner_map(const CMatrix& kernel, const GridSpec& g);

/// Kernel A with dx*dxi*sum W[r].*a == dx^2 * sum_ab r_ab A_ba for every r.
CMatrix wigner_adjoint(const CMatrix& symbol, const GridSpec& g);

}  // namespace rbq::detail
