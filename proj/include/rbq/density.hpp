#pragma once

#include <cstddef>
#include <filesystem>

#include "rbq/grid.hpp"
#include "rbq/wavefunction.hpp"

namespace rbq {

/// Single-particle reduced density matrix; kernel(i, j) = r(x_i, x_j).
struct DensityMatrix1 {
  CMatrix kernel;
  GridSpec grid;

  /// Plain matrix of the operator (kernel * dx); its eigenvalues are the occupations.
  CMatrix matrix() const { return kernel * grid.dx(); }
  cplx trace() const { return kernel.diagonal().sum() * grid.dx(); }
  /// max |r - r^H| (kernel entries)
  double hermiticity_defect() const;
  double min_eigenvalue() const;

  static DensityMatrix1 pure(const GridSpec& g, std::span<const cplx> orbital);
};

/// Partial trace over every particle except `label` (0-based).
DensityMatrix1 reduce_one(const WaveFunctionN& psi, std::size_t label);

/// (1/N) sum over labels of reduce_one.
DensityMatrix1 reduce_one_symmetrized(const WaveFunctionN& psi);

/// dx * (r(x_0, x_0) + r(x_{M-1}, x_{M-1})): occupation of the cells next to the
/// periodic seam. Wave packets are expected to keep this below 1e-10.
double boundary_mass(const DensityMatrix1& rho);
inline constexpr double kBoundaryMassLimit = 1e-10;

/// Trace norm of rho - sigma.
double trace_distance(const DensityMatrix1& rho, const DensityMatrix1& sigma);

/// Running mean of reduced density matrices with per-entry spread.
class EnsembleAccumulator {
 public:
  EnsembleAccumulator() = default;
  explicit EnsembleAccumulator(const GridSpec& g);

  void add(const DensityMatrix1& rho);

  std::size_t count() const noexcept { return count_; }
  DensityMatrix1 mean() const;
  /// Sample variance of |r_ij| fluctuations per entry (sum of real and imaginary parts).
  RMatrix variance() const;
  /// sqrt(variance / K)
  RMatrix std_error() const;

 private:
  GridSpec grid_;
  std::size_t count_ = 0;
  CMatrix mean_;
  RMatrix m2_;
};

EnsembleAccumulator ensemble_mean(EnsembleAccumulator acc, const DensityMatrix1& rho);

/// State container (magic "RBQ1", N = 2 axes read as row, column) plus a JSON
/// sidecar `<path>.json` with trace, min eigenvalue and Hermiticity defect.
void save_density(const DensityMatrix1& rho, const std::filesystem::path& path);
DensityMatrix1 load_density(const std::filesystem::path& path);

}  // namespace rbq
