#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

namespace rbq {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

/// Periodic 1-D discretization on [-L/2, L/2) with M points, shared by every
/// one-particle operator. Momentum is xi_k = 2*pi*hbar*k/L, k = -M/2 .. M/2-1.
class GridSpec {
 public:
  GridSpec() = default;

  double length() const noexcept { return length_; }
  std::size_t points() const noexcept { return points_; }
  double hbar() const noexcept { return hbar_; }
  double dx() const noexcept { return length_ / static_cast<double>(points_); }
  double dxi() const noexcept;

  double x(std::size_t j) const noexcept { return -0.5 * length_ + static_cast<double>(j) * dx(); }
  /// Signed momentum index of DFT bin q (standard FFT ordering).
  long signed_mode(std::size_t q) const noexcept;
  /// Momentum of DFT bin q; bin M/2 carries the Nyquist value -M/2.
  double xi_of_bin(std::size_t q) const noexcept;
  /// Momentum at ordered index k in 0..M-1, i.e. k - M/2 steps from zero.
  double xi(std::size_t k) const noexcept;

  std::vector<double> positions() const;
  std::vector<double> momenta() const;

  bool operator==(const GridSpec&) const = default;

 private:
  friend GridSpec make_grid(double, std::size_t, double);
  double length_ = 0.0;
  std::size_t points_ = 0;
  double hbar_ = 0.0;
};

/// Throws std::invalid_argument for M not a power of two >= 8, L <= 0 or hbar <= 0.
GridSpec make_grid(double length, std::size_t points, double hbar);

/// One-particle operator stored as its position-space kernel. The operator
/// acts as (A psi)_i = sum_j kernel(i, j) psi_j dx, so the plain matrix of
/// the operator is kernel * dx.
struct OperatorMatrix {
  CMatrix kernel;
  double dx = 1.0;
  bool hermitian = false;

  CMatrix matrix() const { return kernel * dx; }
  static OperatorMatrix from_matrix(const CMatrix& m, double dx, bool hermitian = false) {
    return {m / dx, dx, hermitian};
  }
};

/// Real phase-space samples a(x_j, xi_k), rows over x, columns over ordered xi.
using PhaseGrid = RMatrix;
/// Complex phase-space samples (test symbols).
using CPhaseGrid = CMatrix;

/// Discrete Weyl quantization: the exact trace-pairing adjoint of wigner(),
/// trace(rho * weyl_quantize(a)) = dx * dxi * sum W[rho] * a for Hermitian rho.
OperatorMatrix weyl_quantize(const CPhaseGrid& symbol, const GridSpec& g);

/// diag(x_j) as an operator matrix (plain matrix form).
CMatrix position_matrix(const GridSpec& g);
/// -i hbar d/dx through the DFT, plain matrix form.
CMatrix momentum_matrix(const GridSpec& g);

/// Largest singular value.
double operator_norm(const CMatrix& m);

}  // namespace rbq
