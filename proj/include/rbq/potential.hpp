#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rbq/batching.hpp"
#include "rbq/grid.hpp"

namespace rbq {

/// Even pair potential V(z).
struct PotentialSpec {
  enum class Kind { zero, gaussian, cosine, tabulated };

  Kind kind = Kind::zero;
  /// gaussian: alpha * exp(-z^2 / (2 w^2)); cosine: alpha * cos(wavenumber * z).
  double amplitude = 0.0;
  double width = 1.0;
  double wavenumber = 0.0;
  /// tabulated: V(i * spacing) for i >= 0, mirrored to negative z and
  /// band-limited (sinc) interpolated between samples.
  std::vector<double> samples;
  double spacing = 0.0;

  static PotentialSpec zero() { return {}; }
  static PotentialSpec gaussian(double amplitude, double width);
  static PotentialSpec cosine(double amplitude, double wavenumber);
  static PotentialSpec tabulated(std::vector<double> samples, double spacing);

  double operator()(double z) const;

  /// V(z) -> 0 as |z| -> infinity. Cosine is the only built-in kind that fails.
  bool decays() const noexcept { return kind != Kind::cosine; }
  std::string describe() const;
};

struct PotentialConstants {
  double lambda = 0.0;    ///< (1/2pi) int |w| |V^(w)| dw
  double lconst = 0.0;    ///< (1/2pi) int w^2 |V^(w)| dw
  double sup_norm = 0.0;  ///< sup |V|
};

/// Closed forms for gaussian/cosine/zero, adaptive Gauss-Kronrod for tabulated.
/// Throws std::domain_error for tabulated samples without decay at the tail.
PotentialConstants potential_constants(const PotentialSpec& spec);

/// Which pair terms enter the interaction and with what coupling.
struct InteractionMode {
  std::vector<IndexPair> pairs;
  double coupling = 1.0;
  /// Set for partition modes: the pairs must then cover all N labels.
  bool batched = false;

  /// All N(N-1)/2 pairs with coupling 1/(N-1).
  static InteractionMode full(std::size_t particles);
  /// The N/2 pairs of a partition with coupling 1.
  static InteractionMode partition(const PairPartition& p);
};

/// V(minimal image of d * dx) for d = 0 .. M-1.
std::vector<double> pair_table(const PotentialSpec& spec, const GridSpec& g);

struct InteractionDiagonal {
  std::vector<double> values;  ///< M^N entries, particle 0 slowest.
  std::size_t pair_evaluations = 0;
};

/// Diagonal of coupling * sum over mode.pairs of V(x_l - x_n) on the M^N grid.
InteractionDiagonal interaction_diagonal(const PotentialSpec& spec, const GridSpec& g, std::size_t particles,
                                         const InteractionMode& mode);

}  // namespace rbq
