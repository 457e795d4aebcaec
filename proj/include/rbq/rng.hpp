#pragma once

// Counter-based random streams (Philox4x32-10, Salmon et al. 2011).
//
// A stream is a pure function of (key, counter): deriving the stream for
// (seed, realization, step) needs no sequential state, so any realization or
// step can be regenerated independently and in any order.

#include <array>
#include <cstdint>

namespace rbq {

class Philox4x32 {
 public:
  using block = std::array<std::uint32_t, 4>;
  using key_type = std::array<std::uint32_t, 2>;

  static block generate(block ctr, key_type key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Value-type stream over one (seed, realization, step) coordinate. Copying a
/// stream forks it: both copies then produce the same sequence.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t realization, std::uint32_t step) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        realization_(realization),
        step_(step) {}

  std::uint32_t next_u32() noexcept {
    if (used_ == 4) refill();
    return buffer_[used_++];
  }

  /// Uniform integer in [0, bound), bound >= 1 (Lemire's multiply-shift with rejection).
  std::uint32_t uniform_below(std::uint32_t bound) noexcept {
    std::uint64_t product = static_cast<std::uint64_t>(next_u32()) * bound;
    auto low = static_cast<std::uint32_t>(product);
    if (low < bound) {
      const std::uint32_t threshold = (0u - bound) % bound;
      while (low < threshold) {
        product = static_cast<std::uint64_t>(next_u32()) * bound;
        low = static_cast<std::uint32_t>(product);
      }
    }
    return static_cast<std::uint32_t>(product >> 32);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept {
    const std::uint64_t hi = next_u32() >> 5;
    const std::uint64_t lo = next_u32() >> 6;
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
  }

 private:
  void refill() noexcept {
    buffer_ = Philox4x32::generate({static_cast<std::uint32_t>(realization_),
                                    static_cast<std::uint32_t>(realization_ >> 32), step_,
                                    static_cast<std::uint32_t>(blocks_)},
                                   key_);
    ++blocks_;
    used_ = 0;
  }

  Philox4x32::key_type key_;
  std::uint64_t realization_;
  std::uint32_t step_;
  std::uint64_t blocks_ = 0;
  Philox4x32::block buffer_{};
  unsigned used_ = 4;
};

}  // namespace rbq
