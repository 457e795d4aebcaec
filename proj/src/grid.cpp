#include "rbq/grid.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "phase_space.hpp"

namespace rbq {

GridSpec make_grid(double length, std::size_t points, double hbar) {
  if (points < 8 || !std::has_single_bit(points)) {
    throw std::invalid_argument("grid: M must be a power of two >= 8, got " + std::to_string(points));
  }
  if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("grid: L must be positive");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw std::invalid_argument("grid: hbar must be positive");
  GridSpec g;
  g.length_ = length;
  g.points_ = points;
  g.hbar_ = hbar;
  return g;
}

double GridSpec::dxi() const noexcept { return 2.0 * std::numbers::pi * hbar_ / length_; }

long GridSpec::signed_mode(std::size_t q) const noexcept {
  const long m = static_cast<long>(points_);
  const long sq = static_cast<long>(q);
  return sq < m / 2 ? sq : sq - m;
}

double GridSpec::xi_of_bin(std::size_t q) const noexcept {
  return static_cast<double>(signed_mode(q)) * dxi();
}

double GridSpec::xi(std::size_t k) const noexcept {
  return (static_cast<double>(k) - static_cast<double>(points_ / 2)) * dxi();
}

std::vector<double> GridSpec::positions() const {
  std::vector<double> out(points_);
  for (std::size_t j = 0; j < points_; ++j) out[j] = x(j);
  return out;
}

std::vector<double> GridSpec::momenta() const {
  std::vector<double> out(points_);
  for (std::size_t k = 0; k < points_; ++k) out[k] = xi(k);
  return out;
}

OperatorMatrix weyl_quantize(const CPhaseGrid& symbol, const GridSpec& g) {
  const auto m = static_cast<Eigen::Index>(g.points());
  if (symbol.rows() != m || symbol.cols() != m) {
    throw std::invalid_argument("weyl_quantize: symbol must be sampled on the full M x M phase grid");
  }
  OperatorMatrix op;
  op.kernel = detail::wigner_adjoint(symbol, g);
  op.dx = g.dx();
  op.hermitian = symbol.imag().cwiseAbs().maxCoeff() == 0.0;
  if (op.hermitian) {
    // Exact in exact arithmetic; remove the roundoff asymmetry.
    op.kernel = 0.5 * (op.kernel + op.kernel.adjoint()).eval();
  }
  return op;
}

CMatrix position_matrix(const GridSpec& g) {
  const auto m = static_cast<Eigen::Index>(g.points());
  CMatrix out = CMatrix::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) out(j, j) = g.x(static_cast<std::size_t>(j));
  return out;
}

CMatrix momentum_matrix(const GridSpec& g) {
  const std::size_t m = g.points();
  std::vector<cplx> row(m);
  for (std::size_t d = 0; d < m; ++d) {
    cplx s = 0.0;
    for (std::size_t q = 0; q < m; ++q) {
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(q * d % m) / static_cast<double>(m);
      s += g.xi_of_bin(q) * cplx(std::cos(ang), std::sin(ang));
    }
    row[d] = s / static_cast<double>(m);
  }
  CMatrix out(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out(i, j) = row[(i + m - j) % m];
  return out;
}

double operator_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.adjoint() * a, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace rbq
