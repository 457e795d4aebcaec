#include "rbq/batching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rbq {
namespace {

void require_even(std::size_t n, const char* what) {
  if (n == 0 || n % 2 != 0) {
    throw std::invalid_argument(std::string(what) + ": particle count must be even and positive, got " +
                                std::to_string(n));
  }
}

}  // namespace

void shuffle_into(RngStream& stream, std::span<std::size_t> labels) noexcept {
  for (std::size_t i = labels.size(); i > 1; --i) {
    const std::size_t j = stream.uniform_below(static_cast<std::uint32_t>(i));
    std::swap(labels[i - 1], labels[j]);
  }
}

std::vector<std::size_t> shuffle(RngStream& stream, std::size_t n) {
  require_even(n, "shuffle");
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  shuffle_into(stream, sigma);
  return sigma;
}

PairPartition PairPartition::from_permutation(std::vector<std::size_t> sigma) {
  const std::size_t n = sigma.size();
  require_even(n, "PairPartition");
  std::vector<bool> seen(n, false);
  for (std::size_t v : sigma) {
    if (v >= n || seen[v]) throw std::invalid_argument("PairPartition: input is not a permutation");
    seen[v] = true;
  }
  PairPartition p;
  p.pairs_.reserve(n / 2);
  p.partner_.assign(n, 0);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const std::size_t a = sigma[2 * k], b = sigma[2 * k + 1];
    p.pairs_.emplace_back(std::min(a, b), std::max(a, b));
    p.partner_[a] = b;
    p.partner_[b] = a;
  }
  p.sigma_ = std::move(sigma);
  return p;
}

bool PairPartition::together(std::size_t l, std::size_t n) const {
  if (l == n) throw std::invalid_argument("indicator: l and n must differ");
  if (l >= particles() || n >= particles()) throw std::out_of_range("indicator: label out of range");
  return partner_[l] == n;
}

std::string PairPartition::to_string() const {
  std::ostringstream os;
  for (const auto& [a, b] : pairs_) os << '(' << a + 1 << ',' << b + 1 << ')';
  return os.str();
}

BatchSchedule::BatchSchedule(double dt, std::uint64_t seed, std::uint64_t realization, std::size_t particles)
    : dt_(dt), seed_(seed), realization_(realization), particles_(particles) {
  if (!(dt > 0.0)) throw std::invalid_argument("BatchSchedule: dt must be positive");
  require_even(particles, "BatchSchedule");
}

std::size_t BatchSchedule::step_index(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("BatchSchedule: t must be nonnegative");
  const double q = t / dt_;
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 1e-12 * std::max(1.0, nearest)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::floor(q));
}

BatchSchedule BatchSchedule::round_robin(double dt, std::uint64_t seed, std::uint64_t block, std::size_t member,
                                        std::size_t particles) {
  BatchSchedule s(dt, seed, block, particles);
  if (member + 1 >= particles) throw std::invalid_argument("BatchSchedule: round-robin member must be < N - 1");
  s.member_ = member;
  return s;
}

std::vector<IndexPair> round_robin_round(std::size_t n, std::size_t r) {
  require_even(n, "round_robin_round");
  if (r + 1 >= n) throw std::invalid_argument("round_robin_round: round must be < N - 1");
  const std::size_t k = n - 1;
  std::vector<IndexPair> out{{r, k}};
  for (std::size_t i = 1; i < n / 2; ++i) out.emplace_back((r + i) % k, (r + k - i) % k);
  return out;
}

PairPartition BatchSchedule::partition(std::size_t step) const {
  RngStream stream(seed_, realization_, static_cast<std::uint32_t>(step));
  std::vector<std::size_t> sigma = shuffle(stream, particles_);
  if (!blocked()) return PairPartition::from_permutation(std::move(sigma));
  std::vector<std::size_t> relabeled;
  relabeled.reserve(particles_);
  for (const auto& [a, b] : round_robin_round(particles_, member_)) {
    relabeled.push_back(sigma[a]);
    relabeled.push_back(sigma[b]);
  }
  return PairPartition::from_permutation(std::move(relabeled));
}

int BatchSchedule::indicator(double t, std::size_t l, std::size_t n) const {
  return partition(step_index(t)).together(l, n) ? 1 : 0;
}

void BatchSchedule::dump(std::ostream& out, std::size_t steps) const {
  for (std::size_t j = 0; j < steps; ++j) out << j << ": " << partition(j).to_string() << '\n';
}

PairFrequency pair_frequency_exhaustive(std::size_t n) {
  require_even(n, "pair_frequency");
  if (n > 8) throw std::invalid_argument("pair_frequency: exhaustive mode limited to N <= 8");
  PairFrequency out;
  out.particles = n;
  out.numerator.assign(n * n, 0);
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  std::uint64_t total = 0;
  do {
    ++total;
    for (std::size_t k = 0; k < n / 2; ++k) {
      const std::size_t a = std::min(sigma[2 * k], sigma[2 * k + 1]);
      const std::size_t b = std::max(sigma[2 * k], sigma[2 * k + 1]);
      ++out.numerator[a * n + b];
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  out.denominator = total;
  out.frequency.assign(n * n, 0.0);
  out.std_error.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n * n; ++i) {
    out.frequency[i] = static_cast<double>(out.numerator[i]) / static_cast<double>(total);
  }
  return out;
}

PairFrequency pair_frequency_montecarlo(std::size_t n, std::uint64_t samples, std::uint64_t seed) {
  require_even(n, "pair_frequency");
  if (samples == 0) throw std::invalid_argument("pair_frequency: need at least one sample");
  PairFrequency out;
  out.particles = n;
  out.samples = samples;
  out.numerator.assign(n * n, 0);
  std::vector<std::uint64_t> hits(n * n, 0);
  std::vector<std::size_t> sigma(n);
  for (std::uint64_t s = 0; s < samples; ++s) {
    RngStream stream(seed, s, 0);
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    shuffle_into(stream, sigma);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const std::size_t a = std::min(sigma[2 * k], sigma[2 * k + 1]);
      const std::size_t b = std::max(sigma[2 * k], sigma[2 * k + 1]);
      ++hits[a * n + b];
    }
  }
  out.frequency.assign(n * n, 0.0);
  out.std_error.assign(n * n, 0.0);
  const auto k = static_cast<double>(samples);
  for (std::size_t i = 0; i < n * n; ++i) {
    const double p = static_cast<double>(hits[i]) / k;
    out.frequency[i] = p;
    out.std_error[i] = std::sqrt(std::max(p * (1.0 - p), 0.0) / k);
  }
  return out;
}

}  // namespace rbq
