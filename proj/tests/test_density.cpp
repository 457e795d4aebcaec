#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "rbq/container.hpp"
#include "rbq/density.hpp"

using namespace rbq;

namespace {

WaveFunctionN random_state(std::mt19937_64& rng, const GridSpec& g, std::size_t n) {
  WaveFunctionN psi(g, n);
  std::normal_distribution<double> d;
  for (auto& a : psi.amplitudes()) a = cplx(d(rng), d(rng));
  psi.normalize();
  return psi;
}

CMatrix brute_force_reduce(const WaveFunctionN& psi, std::size_t label) {
  const std::size_t m = psi.grid().points(), n = psi.particles();
  std::size_t stride = 1;
  for (std::size_t k = label + 1; k < n; ++k) stride *= m;
  CMatrix r = CMatrix::Zero(m, m);
  const std::size_t total = psi.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    const std::size_t i = (idx / stride) % m;
    const std::size_t base = idx - i * stride;
    for (std::size_t j = 0; j < m; ++j) r(i, j) += psi.data()[idx] * std::conj(psi.data()[base + j * stride]);
  }
  return r * std::pow(psi.grid().dx(), static_cast<double>(n - 1));
}

DensityMatrix1 random_density(std::mt19937_64& rng, const GridSpec& g) {
  const auto m = static_cast<Eigen::Index>(g.points());
  std::normal_distribution<double> d;
  CMatrix a(m, m);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = cplx(d(rng), d(rng));
  CMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return {rho / g.dx(), g};
}

}  // namespace

TEST_CASE("partial trace against the brute-force sum") {
  std::mt19937_64 rng(1);
  const GridSpec g = make_grid(4.0, 8, 1.0);
  for (std::size_t n : {1u, 2u, 3u}) {
    const auto psi = random_state(rng, g, n);
    for (std::size_t l = 0; l < n; ++l) {
      CAPTURE(n);
      CAPTURE(l);
      CHECK((reduce_one(psi, l).kernel - brute_force_reduce(psi, l)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  CHECK_THROWS_AS(reduce_one(random_state(rng, g, 2), 2), std::out_of_range);
}

TEST_CASE("product state reduces to its orbital") {
  const GridSpec g = make_grid(8.0, 16, 0.5);
  const std::vector<std::vector<cplx>> orb{gaussian_orbital(g, -1.0, 0.8, 0.5), gaussian_orbital(g, 1.5, 0.6)};
  const auto psi = WaveFunctionN::product(g, orb);
  const auto r0 = reduce_one(psi, 0), r1 = reduce_one(psi, 1);
  CHECK((r0.kernel - DensityMatrix1::pure(g, orb[0]).kernel).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((r1.kernel - DensityMatrix1::pure(g, orb[1]).kernel).cwiseAbs().maxCoeff() <= 1e-12);
  const auto sym = reduce_one_symmetrized(psi);
  CHECK((sym.kernel - 0.5 * (r0.kernel + r1.kernel)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("reduced densities are Hermitian, unit trace and positive") {
  std::mt19937_64 rng(2);
  const GridSpec g = make_grid(4.0, 8, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto psi = random_state(rng, g, 3);
    const auto r = reduce_one_symmetrized(psi);
    CHECK(r.hermiticity_defect() <= 1e-12);
    CHECK(std::abs(r.trace() - 1.0) <= 1e-12);
    CHECK(r.min_eigenvalue() >= -1e-12);
  }
}

TEST_CASE("symmetric states give identical one-body reductions") {
  std::mt19937_64 rng(3);
  const GridSpec g = make_grid(4.0, 8, 1.0);
  const auto psi = random_state(rng, g, 3).symmetrized();
  const auto r0 = reduce_one(psi, 0).kernel;
  CHECK((reduce_one(psi, 1).kernel - r0).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((reduce_one(psi, 2).kernel - r0).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("trace distance is a metric bounded by two") {
  std::mt19937_64 rng(4);
  const GridSpec g = make_grid(4.0, 8, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_density(rng, g), b = random_density(rng, g), c = random_density(rng, g);
    const double ab = trace_distance(a, b);
    CHECK(trace_distance(a, a) <= 1e-12);
    CHECK(ab == doctest::Approx(trace_distance(b, a)).epsilon(1e-12));
    CHECK(ab >= 0.0);
    CHECK(ab <= 2.0 + 1e-12);
    CHECK(ab <= trace_distance(a, c) + trace_distance(c, b) + 1e-12);
    const Eigen::JacobiSVD<CMatrix> svd((a.kernel - b.kernel) * g.dx());
    CHECK(ab == doctest::Approx(svd.singularValues().sum()).epsilon(1e-10));
  }
}

TEST_CASE("orthogonal pure states are at distance two") {
  const GridSpec g = make_grid(16.0, 64, 1.0);
  const auto a = gaussian_orbital(g, -4.0, 0.5), b = gaussian_orbital(g, 4.0, 0.5);
  CHECK(trace_distance(DensityMatrix1::pure(g, a), DensityMatrix1::pure(g, b)) ==
        doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("ensemble mean is linear and the spread is the sample variance") {
  std::mt19937_64 rng(5);
  const GridSpec g = make_grid(4.0, 8, 1.0);
  const auto a = random_density(rng, g), b = random_density(rng, g);
  EnsembleAccumulator acc(g);
  acc.add(a);
  acc.add(b);
  CHECK(acc.count() == 2);
  CHECK((acc.mean().kernel - 0.5 * (a.kernel + b.kernel)).cwiseAbs().maxCoeff() <= 1e-14);
  const RMatrix expected = 0.5 * (a.kernel - b.kernel).cwiseAbs2();
  CHECK((acc.variance() - expected).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((acc.std_error() - (expected / 2.0).cwiseSqrt()).cwiseAbs().maxCoeff() <= 1e-12);
  const auto again = ensemble_mean(ensemble_mean(EnsembleAccumulator(), a), b);
  CHECK((again.mean().kernel - acc.mean().kernel).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(EnsembleAccumulator().mean(), std::logic_error);
  EnsembleAccumulator other(make_grid(4.0, 16, 1.0));
  CHECK_THROWS_AS(other.add(a), std::invalid_argument);
}

TEST_CASE("a mixture of product states reduces to the mixture of reductions") {
  std::mt19937_64 rng(6);
  const GridSpec g = make_grid(4.0, 8, 1.0);
  const auto p = random_state(rng, g, 2), q = random_state(rng, g, 2);
  const double w = 0.3;
  CMatrix mix = w * reduce_one(p, 0).kernel + (1 - w) * reduce_one(q, 0).kernel;
  const DensityMatrix1 r{mix, g};
  CHECK(std::abs(r.trace() - 1.0) <= 1e-12);
  CHECK(r.min_eigenvalue() >= -1e-12);
  CHECK(trace_distance(r, reduce_one(p, 0)) <= (1 - w) * trace_distance(reduce_one(q, 0), reduce_one(p, 0)) + 1e-12);
}

TEST_CASE("boundary mass") {
  const GridSpec g = make_grid(16.0, 32, 0.5);
  CHECK(boundary_mass(DensityMatrix1::pure(g, gaussian_orbital(g, 0.0, 1.0))) < kBoundaryMassLimit);
  CHECK(boundary_mass(DensityMatrix1::pure(g, gaussian_orbital(g, 7.0, 1.0))) > 1e-3);
}

TEST_CASE("density container and sidecar") {
  std::mt19937_64 rng(7);
  const GridSpec g = make_grid(4.0, 8, 1.0);
  const auto rho = random_density(rng, g);
  const auto path = std::filesystem::temp_directory_path() / "rbq_test_density.rbq";
  save_density(rho, path);
  const auto back = load_density(path);
  CHECK((back.kernel - rho.kernel).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.grid == g);
  std::ifstream js(path.string() + ".json");
  const auto side = nlohmann::json::parse(js);
  CHECK(side.at("trace").get<double>() == doctest::Approx(1.0));
  CHECK(side.at("min_eigenvalue").get<double>() == doctest::Approx(rho.min_eigenvalue()));
  CHECK(side.at("hermiticity_defect").get<double>() <= 1e-12);

  const auto psi = random_state(rng, g, 3);
  save_state(psi, path);
  try {
    load_density(path);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.field() == "N");
  }
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".json");
}
