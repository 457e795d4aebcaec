#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rbq/grid.hpp"

using namespace rbq;

TEST_CASE("grid geometry") {
  const GridSpec g = make_grid(16.0, 32, 0.5);
  CHECK(g.dx() == doctest::Approx(0.5));
  CHECK(g.x(0) == -8.0);
  CHECK(g.x(31) == doctest::Approx(7.5));
  CHECK(g.dxi() == doctest::Approx(2 * std::numbers::pi * 0.5 / 16.0));
  CHECK(g.xi(16) == 0.0);
  CHECK(g.xi(0) == doctest::Approx(-16 * g.dxi()));
  CHECK(g.signed_mode(3) == 3);
  CHECK(g.signed_mode(16) == -16);
  CHECK(g.signed_mode(31) == -1);
  CHECK(g.xi_of_bin(31) == doctest::Approx(-g.dxi()));
  CHECK(g.positions().size() == 32);
  CHECK(g.momenta().front() == doctest::Approx(g.xi(0)));
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(make_grid(0.0, 32, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(-1.0, 32, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1.0, 24, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1.0, 4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1.0, 32, 0.0), std::invalid_argument);
  CHECK_NOTHROW(make_grid(1.0, 8, 1.0));
}

TEST_CASE("momentum matrix acts as hbar k on resolved plane waves") {
  const GridSpec g = make_grid(10.0, 16, 0.7);
  const CMatrix p = momentum_matrix(g);
  for (int q : {-7, -1, 0, 3, 7}) {
    Eigen::VectorXcd v(16);
    const double k = 2 * std::numbers::pi * q / g.length();
    for (int j = 0; j < 16; ++j) v(j) = std::exp(cplx(0, k * g.x(j)));
    CHECK((p * v - g.hbar() * k * v).norm() <= 1e-12 * std::max(1.0, std::abs(k)));
  }
  CHECK((p - p.adjoint()).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("weyl quantization of position symbols is exact") {
  const GridSpec g = make_grid(8.0, 16, 0.5);
  CPhaseGrid a(16, 16);
  for (int j = 0; j < 16; ++j)
    for (int k = 0; k < 16; ++k) a(j, k) = std::sin(g.x(j)) + 0.25 * g.x(j) * g.x(j);
  const OperatorMatrix op = weyl_quantize(a, g);
  CHECK(op.hermitian);
  const CMatrix m = op.matrix();
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      const cplx expect = i == j ? cplx(std::sin(g.x(i)) + 0.25 * g.x(i) * g.x(i), 0.0) : cplx(0.0);
      CHECK(std::abs(m(i, j) - expect) <= 1e-12);
    }
}

TEST_CASE("weyl quantization of xi matches momentum off the Nyquist mode") {
  const GridSpec g = make_grid(8.0, 16, 0.5);
  CPhaseGrid a(16, 16);
  for (int j = 0; j < 16; ++j)
    for (int k = 0; k < 16; ++k) a(j, k) = g.xi(k);
  const CMatrix op = weyl_quantize(a, g).matrix();
  // Projector onto the modes other than -M/2.
  CMatrix f(16, 16);
  for (int q = 0; q < 16; ++q)
    for (int j = 0; j < 16; ++j) f(q, j) = std::exp(cplx(0, -2 * std::numbers::pi * q * j / 16.0)) / 4.0;
  CMatrix proj = CMatrix::Identity(16, 16);
  Eigen::VectorXcd ny = f.row(8).adjoint();
  proj -= ny * ny.adjoint();
  const CMatrix p = momentum_matrix(g);
  CHECK((proj * op * proj - proj * p * proj).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("real symbols quantize to Hermitian operators") {
  const GridSpec g = make_grid(6.0, 16, 0.3);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  CPhaseGrid a(16, 16);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = d(rng);
  const OperatorMatrix op = weyl_quantize(a, g);
  CHECK(op.hermitian);
  CHECK((op.kernel - op.kernel.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  a(3, 4) += cplx(0, 1);
  CHECK_FALSE(weyl_quantize(a, g).hermitian);
}

TEST_CASE("weyl quantization is linear") {
  const GridSpec g = make_grid(6.0, 8, 0.3);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d;
  CPhaseGrid a(8, 8), b(8, 8);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a(i) = cplx(d(rng), d(rng));
    b(i) = cplx(d(rng), d(rng));
  }
  const cplx c(0.4, -2.0);
  const CMatrix lhs = weyl_quantize(a + c * b, g).matrix();
  const CMatrix rhs = weyl_quantize(a, g).matrix() + c * weyl_quantize(b, g).matrix();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  CPhaseGrid wrong(4, 4);
  CHECK_THROWS_AS(weyl_quantize(wrong, g), std::invalid_argument);
}

TEST_CASE("operator norm is the largest singular value") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d;
  CMatrix m(7, 7);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = cplx(d(rng), d(rng));
  Eigen::JacobiSVD<CMatrix> svd(m);
  CHECK(operator_norm(m) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));
  CHECK(operator_norm(CMatrix::Zero(4, 4)) == 0.0);
}

TEST_CASE("operator matrix kernel convention") {
  const CMatrix m = CMatrix::Identity(8, 8);
  const OperatorMatrix op = OperatorMatrix::from_matrix(m, 0.25, true);
  CHECK(op.kernel(0, 0) == cplx(4.0));
  CHECK(op.matrix().isApprox(m));
}
