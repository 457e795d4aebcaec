#pragma once

#include <cstddef>
#include <filesystem>
#include <new>
#include <span>
#include <vector>

#include "rbq/grid.hpp"

namespace rbq {

/// 64-byte aligned storage; FFT plans are created and executed on such buffers.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

using AlignedCVector = std::vector<cplx, AlignedAllocator<cplx>>;

/// Default cap on N * M^N.
inline constexpr std::size_t kDefaultAmplitudeCap = std::size_t{1} << 26;

/// Throws std::length_error when N * M^N exceeds `cap`.
std::size_t checked_tensor_size(std::size_t particles, std::size_t points, std::size_t cap = kDefaultAmplitudeCap);

/// N-particle pure state on the M^N grid, axis m = particle m, particle 0 slowest.
class WaveFunctionN {
 public:
  WaveFunctionN() = default;
  WaveFunctionN(const GridSpec& g, std::size_t particles, std::size_t cap = kDefaultAmplitudeCap);

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t particles() const noexcept { return particles_; }
  std::size_t size() const noexcept { return amps_.size(); }

  cplx* data() noexcept { return amps_.data(); }
  const cplx* data() const noexcept { return amps_.data(); }
  std::span<cplx> amplitudes() noexcept { return amps_; }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }

  /// sqrt(dx^N * sum |psi|^2)
  double norm() const;
  void normalize();

  /// dx^N * sum conj(this) * other
  cplx inner(const WaveFunctionN& other) const;
  /// sqrt(dx^N * sum |this - other|^2)
  double distance(const WaveFunctionN& other) const;

  /// Tensor product of one-particle orbitals sampled on g.
  static WaveFunctionN product(const GridSpec& g, std::span<const std::vector<cplx>> orbitals,
                               std::size_t cap = kDefaultAmplitudeCap);

  /// Average over all N! relabelings, renormalized. Requires N <= 8.
  WaveFunctionN symmetrized() const;
  /// Amplitudes with particle axes permuted: out(i_perm[0], ...) = in(i_0, ...).
  WaveFunctionN permuted_axes(std::span<const std::size_t> perm) const;

 private:
  GridSpec grid_;
  std::size_t particles_ = 0;
  AlignedCVector amps_;
};

/// (pi sigma^2)^(-1/4) exp(-(x - c)^2 / (2 sigma^2) + i p x / hbar), renormalized on the grid.
/// Position variance is sigma^2 / 2.
std::vector<cplx> gaussian_orbital(const GridSpec& g, double center, double sigma, double momentum = 0.0);

/// Binary container: "RBQ1", uint32 N, uint32 M, float64 L, float64 hbar
/// (little-endian), then M^N complex doubles (re, im) with particle 0 slowest.
void save_state(const WaveFunctionN& psi, const std::filesystem::path& path);
WaveFunctionN load_state(const std::filesystem::path& path, std::size_t cap = kDefaultAmplitudeCap);

}  // namespace rbq
