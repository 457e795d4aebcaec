#pragma once

// Random reshuffling of particle labels into pair batches.
//
// Labels are 0-based throughout the C++ API. The text dump uses 1-based
// labels to match the usual (a,b)(c,d) notation.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rbq/rng.hpp"

namespace rbq {

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Durstenfeld (Fisher-Yates) shuffle of the identity, N - 1 bounded draws.
/// Throws std::invalid_argument for odd or zero N.
std::vector<std::size_t> shuffle(RngStream& stream, std::size_t n);

/// In-place Durstenfeld shuffle of an existing label array; no allocation.
void shuffle_into(RngStream& stream, std::span<std::size_t> labels) noexcept;

class PairPartition {
 public:
  /// Pairs {sigma(2k), sigma(2k+1)}, each stored as (min, max).
  static PairPartition from_permutation(std::vector<std::size_t> sigma);

  std::size_t particles() const noexcept { return sigma_.size(); }
  const std::vector<std::size_t>& sigma() const noexcept { return sigma_; }
  const std::vector<IndexPair>& pairs() const noexcept { return pairs_; }
  std::size_t partner(std::size_t m) const { return partner_.at(m); }
  bool together(std::size_t l, std::size_t n) const;

  /// "(a,b)(c,d)..." with 1-based labels.
  std::string to_string() const;

 private:
  std::vector<std::size_t> sigma_;
  std::vector<IndexPair> pairs_;
  std::vector<std::size_t> partner_;
};

/// Piecewise-constant batching schedule: partition j governs [j dt, (j+1) dt)
/// and is derived from the stream (seed, realization, j) alone.
class BatchSchedule {
 public:
  BatchSchedule(double dt, std::uint64_t seed, std::uint64_t realization, std::size_t particles);

  /// Member `member` (< N - 1) of a round-robin block. All members of a block
  /// share one random relabeling per step and take different rounds of the
  /// circle-method 1-factorization, so each step's partitions across the block
  /// cover every pair exactly once. Each member alone is still a uniform
  /// random partition at every step.
  static BatchSchedule round_robin(double dt, std::uint64_t seed, std::uint64_t block, std::size_t member,
                                   std::size_t particles);

  double dt() const noexcept { return dt_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t realization() const noexcept { return realization_; }
  std::size_t particles() const noexcept { return particles_; }
  bool blocked() const noexcept { return member_ != kIndependent; }
  std::size_t member() const noexcept { return member_; }

  /// floor(t / dt), with values within 1e-12 relative of an integer snapped to it.
  std::size_t step_index(double t) const;
  PairPartition partition(std::size_t step) const;

  /// 1 iff {l, n} is a pair of the partition governing time t.
  int indicator(double t, std::size_t l, std::size_t n) const;

  /// One line per step: "j: (a,b)(c,d)...".
  void dump(std::ostream& out, std::size_t steps) const;

 private:
  double dt_;
  std::uint64_t seed_;
  std::uint64_t realization_;
  std::size_t particles_;
  static constexpr std::size_t kIndependent = static_cast<std::size_t>(-1);
  std::size_t member_ = kIndependent;
};

/// Round r of the circle-method 1-factorization of K_N: N/2 pairs.
std::vector<IndexPair> round_robin_round(std::size_t n, std::size_t r);

struct PairFrequency {
  std::size_t particles = 0;
  /// Row-major N x N, only l < n entries meaningful.
  std::vector<double> frequency;
  /// Exact mode: numerator over denominator, else zeros.
  std::vector<std::uint64_t> numerator;
  std::uint64_t denominator = 0;
  /// Monte-Carlo mode: binomial standard error per pair, else zeros.
  std::vector<double> std_error;
  std::uint64_t samples = 0;

  double at(std::size_t l, std::size_t n) const { return frequency[l * particles + n]; }
  double se(std::size_t l, std::size_t n) const { return std_error[l * particles + n]; }
};

/// Enumerates all N! permutations; exact rationals. N <= 8.
PairFrequency pair_frequency_exhaustive(std::size_t n);
/// Sample frequencies over `samples` independent shuffles from stream (seed, 0, step).
PairFrequency pair_frequency_montecarlo(std::size_t n, std::uint64_t samples, std::uint64_t seed);

}  // namespace rbq
