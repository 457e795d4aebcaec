#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "rbq/batching.hpp"
#include "rbq/potential.hpp"
#include "rbq/wavefunction.hpp"

namespace rbq {

struct EvolveReport {
  std::size_t steps = 0;              ///< Hamiltonian-constant intervals (full: 1)
  std::size_t substeps_per_step = 0;  ///< Strang substeps per full interval
  std::size_t total_substeps = 0;
  std::size_t pair_evaluations = 0;   ///< pair terms applied: total_substeps * pairs per substep
  std::size_t pair_builds = 0;        ///< pair tables built: rebuilds * pairs per rebuild
  double interaction_build_seconds = 0.0;
  double wall_seconds = 0.0;
};

enum class SplitScheme {
  strang,   ///< V/2 K V/2, second order
  suzuki4,  ///< five Strang stages of lengths p, p, 1-4p, p, p (p = 1/(4 - 4^(1/3))), fourth order
};

/// Symmetric splitting V(a0) K(b0) V(a1) ... K(b_{s-1}) V(a_s), coefficients summing to 1.
struct SplitCoefficients {
  std::vector<double> potential;
  std::vector<double> kinetic;
  static const SplitCoefficients& of(SplitScheme scheme);
};

/// One Strang step exp(-i dtau V/2hbar) exp(-i dtau K/hbar) exp(-i dtau V/2hbar)
/// with the kinetic part applied exactly in the discrete Fourier basis.
void strang_step(WaveFunctionN& psi, std::span<const double> diagonal, double dtau);

/// Reusable split-step machinery for one (grid, N): FFT plans and phase tensors.
class SplitStepper {
 public:
  SplitStepper(const GridSpec& g, std::size_t particles);
  ~SplitStepper();
  SplitStepper(SplitStepper&&) noexcept;
  SplitStepper& operator=(SplitStepper&&) noexcept;

  /// Propagates psi over `substeps` Strang steps of length h under a fixed
  /// interaction mode. Returns the number of pair tables built.
  std::size_t advance(WaveFunctionN& psi, const PotentialSpec& spec, const InteractionMode& mode, double h,
                      std::size_t substeps, double* build_seconds = nullptr,
                      SplitScheme scheme = SplitScheme::strang);

  /// Free (V = 0) propagation over time t in one exact Fourier step.
  void free_evolve(WaveFunctionN& psi, double t);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Substeps for the full dynamics: ceil(t * per_unit), at least 1 when t > 0.
std::size_t full_substeps(double t, std::size_t per_unit);

struct FullEvolveResult {
  WaveFunctionN psi;
  EvolveReport report;
};

FullEvolveResult evolve_full(const WaveFunctionN& psi0, double t, std::size_t substeps_per_unit,
                             const PotentialSpec& spec, SplitScheme scheme = SplitScheme::strang);

/// Substeps per Delta t interval; when `per_unit` > 0 the count is
/// max(1, round(dt * per_unit)) instead of the fixed `per_step`.
struct RbSubsteps {
  std::size_t per_step = 16;
  std::size_t per_unit = 0;
  std::size_t for_interval(double dt) const;
};

FullEvolveResult evolve_rb(const WaveFunctionN& psi0, double t, const BatchSchedule& schedule,
                           RbSubsteps substeps, const PotentialSpec& spec,
                           SplitScheme scheme = SplitScheme::strang);

/// Dense reference: eigendecomposition of the M^N x M^N Hamiltonian. M^N <= 4096.
WaveFunctionN exact_evolve_oracle(const WaveFunctionN& psi0, double t, const PotentialSpec& spec,
                                  const InteractionMode& mode);

/// <psi|H|psi> with the kinetic term evaluated spectrally.
double energy(const WaveFunctionN& psi, const PotentialSpec& spec, const InteractionMode& mode);

}  // namespace rbq
