#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "rbq/batching.hpp"

using namespace rbq;

TEST_CASE("philox4x32-10 known answers") {
  using B = Philox4x32::block;
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are pure functions of their coordinates") {
  RngStream a(7, 3, 11), b(7, 3, 11), c(7, 3, 12), d(7, 4, 11);
  std::vector<std::uint32_t> va, vb, vc, vd;
  for (int i = 0; i < 12; ++i) {
    va.push_back(a.next_u32());
    vb.push_back(b.next_u32());
    vc.push_back(c.next_u32());
    vd.push_back(d.next_u32());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
  RngStream e(7, 3, 11);
  e.next_u32();
  RngStream fork = e;
  CHECK(fork.next_u32() == e.next_u32());
}

TEST_CASE("bounded draws are uniform (chi-square)") {
  RngStream s(1, 0, 0);
  const std::uint32_t bound = 7;
  const int draws = 70000;
  std::vector<int> counts(bound, 0);
  for (int i = 0; i < draws; ++i) {
    const auto v = s.uniform_below(bound);
    REQUIRE(v < bound);
    ++counts[v];
  }
  double chi2 = 0.0;
  const double expected = static_cast<double>(draws) / bound;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 6 degrees of freedom; 0.999 quantile is 22.46.
  CHECK(chi2 < 22.46);
  for (int i = 0; i < 1000; ++i) {
    const double u = s.uniform01();
    CHECK((u >= 0.0 && u < 1.0));
  }
}

TEST_CASE("shuffle yields a permutation and rejects odd N") {
  RngStream s(2, 0, 0);
  for (std::size_t n : {2u, 4u, 6u, 10u, 64u}) {
    auto sigma = shuffle(s, n);
    std::sort(sigma.begin(), sigma.end());
    std::vector<std::size_t> id(n);
    std::iota(id.begin(), id.end(), 0);
    CHECK(sigma == id);
  }
  CHECK_THROWS_AS(shuffle(s, 3), std::invalid_argument);
  CHECK_THROWS_AS(shuffle(s, 0), std::invalid_argument);
}

TEST_CASE("all 24 permutations of four labels appear equally often") {
  std::map<std::vector<std::size_t>, int> counts;
  const int draws = 48000;
  for (int i = 0; i < draws; ++i) {
    RngStream s(3, static_cast<std::uint64_t>(i), 0);
    ++counts[shuffle(s, 4)];
  }
  CHECK(counts.size() == 24);
  double chi2 = 0.0;
  const double expected = draws / 24.0;
  for (const auto& [perm, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 23 degrees of freedom; 0.999 quantile is 49.73.
  CHECK(chi2 < 49.73);
}

TEST_CASE("partition from permutation") {
  const auto p = PairPartition::from_permutation({3, 0, 1, 2});
  CHECK(p.pairs().size() == 2);
  CHECK(p.pairs()[0] == IndexPair{0, 3});
  CHECK(p.pairs()[1] == IndexPair{1, 2});
  CHECK(p.partner(3) == 0);
  CHECK(p.partner(1) == 2);
  CHECK(p.together(2, 1));
  CHECK_FALSE(p.together(0, 1));
  CHECK(p.to_string() == "(1,4)(2,3)");
}

TEST_CASE("exhaustive pair frequency is exactly 1/(N-1)") {
  for (std::size_t n : {2u, 4u, 6u, 8u}) {
    const auto f = pair_frequency_exhaustive(n);
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t m = l + 1; m < n; ++m) {
        CHECK(f.numerator[l * n + m] * (n - 1) == f.denominator);
        CHECK(f.at(l, m) == doctest::Approx(1.0 / static_cast<double>(n - 1)));
      }
  }
}

TEST_CASE("sampled pair frequency within binomial error") {
  const std::size_t n = 10;
  const auto f = pair_frequency_montecarlo(n, 200000, 11);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t m = l + 1; m < n; ++m) {
      const double z = (f.at(l, m) - 1.0 / 9.0) / f.se(l, m);
      CHECK(std::abs(z) < 4.5);
    }
}

TEST_CASE("schedule step index snaps near-integer ratios") {
  BatchSchedule s(0.1, 1, 0, 4);
  CHECK(s.step_index(0.0) == 0);
  CHECK(s.step_index(0.3) == 3);
  CHECK(s.step_index(0.7) == 7);
  CHECK(s.step_index(0.299) == 2);
  CHECK(s.indicator(0.05, s.partition(0).pairs()[0].first, s.partition(0).pairs()[0].second) == 1);
}

TEST_CASE("schedule partitions are reproducible and independent of query order") {
  BatchSchedule a(0.25, 99, 5, 6), b(0.25, 99, 5, 6);
  std::vector<std::string> forward, backward(8);
  for (std::size_t j = 0; j < 8; ++j) forward.push_back(a.partition(j).to_string());
  for (std::size_t j = 8; j-- > 0;) backward[j] = b.partition(j).to_string();
  CHECK(forward == backward);
  std::ostringstream dump;
  a.dump(dump, 2);
  CHECK(dump.str() == "0: " + forward[0] + "\n1: " + forward[1] + "\n");
}

TEST_CASE("indicator sums to one over partners") {
  BatchSchedule s(0.5, 4, 2, 8);
  for (double t : {0.0, 0.6, 1.2, 3.9}) {
    for (std::size_t l = 0; l < 8; ++l) {
      int total = 0;
      for (std::size_t m = 0; m < 8; ++m)
        if (m != l) total += s.indicator(t, l, m);
      CHECK(total == 1);
    }
  }
}

TEST_CASE("round-robin rounds form a 1-factorization") {
  for (std::size_t n : {2u, 4u, 6u, 8u}) {
    std::set<IndexPair> seen;
    for (std::size_t r = 0; r + 1 < n; ++r) {
      const auto pairs = round_robin_round(n, r);
      CHECK(pairs.size() == n / 2);
      std::set<std::size_t> labels;
      for (auto [a, b] : pairs) {
        labels.insert(a);
        labels.insert(b);
        seen.insert({std::min(a, b), std::max(a, b)});
      }
      CHECK(labels.size() == n);
    }
    CHECK(seen.size() == n * (n - 1) / 2);
  }
}

TEST_CASE("round-robin block covers every pair once per step") {
  const std::size_t n = 6;
  for (std::size_t step = 0; step < 5; ++step) {
    std::set<IndexPair> seen;
    for (std::size_t member = 0; member + 1 < n; ++member) {
      const auto s = BatchSchedule::round_robin(0.1, 8, 3, member, n);
      CHECK(s.blocked());
      CHECK(s.member() == member);
      const auto part = s.partition(step);
      for (auto p : part.pairs()) seen.insert(p);
    }
    CHECK(seen.size() == n * (n - 1) / 2);
  }
  CHECK_THROWS(BatchSchedule::round_robin(0.1, 8, 3, n - 1, n));
  CHECK_FALSE(BatchSchedule(0.1, 8, 3, n).blocked());
}

TEST_CASE("a single round-robin member is marginally uniform") {
  const std::size_t n = 4;
  std::map<std::size_t, int> counts;
  const int draws = 30000;
  for (int b = 0; b < draws; ++b) {
    const auto s = BatchSchedule::round_robin(0.1, 17, static_cast<std::uint64_t>(b), 1, n);
    ++counts[s.partition(0).partner(0)];
  }
  CHECK(counts.size() == 3);
  double chi2 = 0.0;
  for (const auto& [k, c] : counts) chi2 += (c - draws / 3.0) * (c - draws / 3.0) / (draws / 3.0);
  // 2 degrees of freedom; 0.999 quantile is 13.82.
  CHECK(chi2 < 13.82);
}
