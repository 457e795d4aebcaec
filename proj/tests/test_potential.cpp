#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "rbq/potential.hpp"

using namespace rbq;

TEST_CASE("gaussian constants match the Fourier integrals") {
  const auto c = potential_constants(PotentialSpec::gaussian(2.0, 0.5));
  CHECK(c.lambda == doctest::Approx(2.0 * std::sqrt(2.0 / std::numbers::pi) / 0.5));
  CHECK(c.lconst == doctest::Approx(2.0 / 0.25));
  CHECK(c.sup_norm == 2.0);
  const auto n = potential_constants(PotentialSpec::gaussian(-1.0, 1.0));
  CHECK(n.lambda == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)));
}

TEST_CASE("cosine and zero constants") {
  const auto c = potential_constants(PotentialSpec::cosine(0.5, 3.0));
  CHECK(c.lambda == doctest::Approx(1.5));
  CHECK(c.lconst == doctest::Approx(4.5));
  CHECK(c.sup_norm == 0.5);
  CHECK_FALSE(PotentialSpec::cosine(1, 1).decays());
  const auto z = potential_constants(PotentialSpec::zero());
  CHECK(z.lambda == 0.0);
  CHECK(z.lconst == 0.0);
  CHECK(z.sup_norm == 0.0);
}

TEST_CASE("tabulated quadrature reproduces the gaussian closed forms") {
  const double h = 0.125;
  std::vector<double> samples;
  for (int i = 0; i < 160; ++i) samples.push_back(std::exp(-0.5 * (i * h) * (i * h)));
  const auto spec = PotentialSpec::tabulated(samples, h);
  const auto c = potential_constants(spec);
  const auto ref = potential_constants(PotentialSpec::gaussian(1.0, 1.0));
  CHECK(c.lambda == doctest::Approx(ref.lambda).epsilon(1e-8));
  CHECK(c.lconst == doctest::Approx(ref.lconst).epsilon(1e-8));
  CHECK(c.sup_norm == doctest::Approx(1.0).epsilon(1e-10));
  for (double z : {0.0, 0.3, -1.7, 2.05})
    CHECK(spec(z) == doctest::Approx(std::exp(-0.5 * z * z)).epsilon(1e-10));
}

TEST_CASE("tabulated input validation") {
  CHECK_THROWS_AS(PotentialSpec::tabulated({1.0}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(PotentialSpec::tabulated({1.0, 0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PotentialSpec::gaussian(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(potential_constants(PotentialSpec::tabulated({1.0, 0.9, 0.8}, 0.5)), std::domain_error);
  CHECK(potential_constants(PotentialSpec::tabulated({0.0, 0.0}, 0.5)).lambda == 0.0);
}

TEST_CASE("pair table uses the minimal image and is even") {
  const GridSpec g = make_grid(8.0, 16, 1.0);
  const auto spec = PotentialSpec::gaussian(1.0, 1.0);
  const auto t = pair_table(spec, g);
  CHECK(t[0] == 1.0);
  for (std::size_t d = 1; d < 16; ++d) CHECK(t[d] == doctest::Approx(t[16 - d]));
  CHECK(t[15] == doctest::Approx(spec(-g.dx())));
}

TEST_CASE("full mode coupling and pair count") {
  const auto m = InteractionMode::full(6);
  CHECK(m.pairs.size() == 15);
  CHECK(m.coupling == doctest::Approx(0.2));
  CHECK_FALSE(m.batched);
  const auto p = InteractionMode::partition(PairPartition::from_permutation({0, 1, 2, 3, 4, 5}));
  CHECK(p.pairs.size() == 3);
  CHECK(p.coupling == 1.0);
}

TEST_CASE("interaction diagonal against a direct sum") {
  const GridSpec g = make_grid(6.0, 8, 1.0);
  const auto spec = PotentialSpec::gaussian(1.3, 0.8);
  const auto d = interaction_diagonal(spec, g, 3, InteractionMode::full(3));
  REQUIRE(d.values.size() == 512);
  const auto table = pair_table(spec, g);
  for (std::size_t idx : {0u, 5u, 77u, 300u, 511u}) {
    const std::size_t i0 = idx / 64, i1 = (idx / 8) % 8, i2 = idx % 8;
    auto v = [&](std::size_t a, std::size_t b) { return table[(a + 8 - b) % 8]; };
    CHECK(d.values[idx] == doctest::Approx(0.5 * (v(i0, i1) + v(i0, i2) + v(i1, i2))));
  }
  CHECK(d.pair_evaluations > 0);
}

TEST_CASE("averaging partition interactions over all shuffles recovers the full interaction") {
  const GridSpec g = make_grid(6.0, 8, 1.0);
  const auto spec = PotentialSpec::gaussian(1.0, 1.0);
  const std::size_t n = 4;
  const auto full = interaction_diagonal(spec, g, n, InteractionMode::full(n));
  std::vector<double> mean(full.values.size(), 0.0);
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  int count = 0;
  do {
    const auto d =
        interaction_diagonal(spec, g, n, InteractionMode::partition(PairPartition::from_permutation(sigma)));
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += d.values[i];
    ++count;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  double worst = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) worst = std::max(worst, std::abs(mean[i] / count - full.values[i]));
  CHECK(worst <= 1e-13);
}

TEST_CASE("partition mode rejects mismatched pairs") {
  const GridSpec g = make_grid(6.0, 8, 1.0);
  const auto spec = PotentialSpec::gaussian(1.0, 1.0);
  InteractionMode bad;
  bad.batched = true;
  bad.pairs = {{0, 1}};
  CHECK_THROWS_AS(interaction_diagonal(spec, g, 4, bad), std::invalid_argument);
  bad.pairs = {{0, 1}, {0, 2}};
  CHECK_THROWS_AS(interaction_diagonal(spec, g, 4, bad), std::invalid_argument);
  InteractionMode out;
  out.pairs = {{0, 5}};
  CHECK_THROWS_AS(interaction_diagonal(spec, g, 4, out), std::invalid_argument);
}
