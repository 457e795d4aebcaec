#include "rbq/density.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "rbq/container.hpp"
#include "tensor_ops.hpp"

namespace rbq {
namespace {

using RowMajorC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

}  // namespace

double DensityMatrix1::hermiticity_defect() const { return (kernel - kernel.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix1::min_eigenvalue() const {
  const CMatrix m = matrix();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DensityMatrix1 DensityMatrix1::pure(const GridSpec& g, std::span<const cplx> orbital) {
  if (orbital.size() != g.points()) throw std::invalid_argument("DensityMatrix1::pure: orbital length mismatch");
  Eigen::Map<const Eigen::VectorXcd> v(orbital.data(), static_cast<Eigen::Index>(orbital.size()));
  return {v * v.adjoint(), g};
}

DensityMatrix1 reduce_one(const WaveFunctionN& psi, std::size_t label) {
  const std::size_t n = psi.particles();
  if (label >= n) throw std::out_of_range("reduce_one: label out of range");
  const GridSpec& g = psi.grid();
  const std::size_t m = g.points();
  const std::size_t outer = detail::ipow(m, label);
  const std::size_t inner = detail::ipow(m, n - 1 - label);
  const auto mi = static_cast<Eigen::Index>(m);

  CMatrix k = CMatrix::Zero(mi, mi);
  for (std::size_t o = 0; o < outer; ++o) {
    Eigen::Map<const RowMajorC> block(psi.data() + o * m * inner, mi, static_cast<Eigen::Index>(inner));
    k.noalias() += block * block.adjoint();
  }
  k *= std::pow(g.dx(), static_cast<double>(n - 1));
  return {k, g};
}

DensityMatrix1 reduce_one_symmetrized(const WaveFunctionN& psi) {
  DensityMatrix1 acc = reduce_one(psi, 0);
  for (std::size_t j = 1; j < psi.particles(); ++j) acc.kernel += reduce_one(psi, j).kernel;
  acc.kernel /= static_cast<double>(psi.particles());
  return acc;
}

double boundary_mass(const DensityMatrix1& rho) {
  const Eigen::Index last = rho.kernel.rows() - 1;
  return rho.grid.dx() * (rho.kernel(0, 0).real() + rho.kernel(last, last).real());
}

double trace_distance(const DensityMatrix1& rho, const DensityMatrix1& sigma) {
  require_same_grid(rho.grid, sigma.grid, "trace_distance");
  const CMatrix d = (rho.kernel - sigma.kernel) * rho.grid.dx();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

EnsembleAccumulator::EnsembleAccumulator(const GridSpec& g)
    : grid_(g),
      mean_(CMatrix::Zero(static_cast<Eigen::Index>(g.points()), static_cast<Eigen::Index>(g.points()))),
      m2_(RMatrix::Zero(static_cast<Eigen::Index>(g.points()), static_cast<Eigen::Index>(g.points()))) {}

void EnsembleAccumulator::add(const DensityMatrix1& rho) {
  if (count_ == 0 && mean_.size() == 0) *this = EnsembleAccumulator(rho.grid);
  require_same_grid(grid_, rho.grid, "ensemble_mean");
  ++count_;
  const CMatrix delta = rho.kernel - mean_;
  mean_ += delta / static_cast<double>(count_);
  const CMatrix delta2 = rho.kernel - mean_;
  m2_ += (delta.real().cwiseProduct(delta2.real()) + delta.imag().cwiseProduct(delta2.imag()));
}

DensityMatrix1 EnsembleAccumulator::mean() const {
  if (count_ == 0) throw std::logic_error("EnsembleAccumulator: empty");
  return {mean_, grid_};
}

RMatrix EnsembleAccumulator::variance() const {
  if (count_ < 2) return RMatrix::Zero(m2_.rows(), m2_.cols());
  return m2_ / static_cast<double>(count_ - 1);
}

RMatrix EnsembleAccumulator::std_error() const {
  return (variance() / static_cast<double>(std::max<std::size_t>(count_, 1))).cwiseSqrt();
}

EnsembleAccumulator ensemble_mean(EnsembleAccumulator acc, const DensityMatrix1& rho) {
  acc.add(rho);
  return acc;
}

void save_density(const DensityMatrix1& rho, const std::filesystem::path& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_density: cannot open " + path.string());
    write_header(out, {{'R', 'B', 'Q', '1'}, 2, static_cast<std::uint32_t>(rho.grid.points()),
                       rho.grid.length(), rho.grid.hbar()});
    for (Eigen::Index i = 0; i < rho.kernel.rows(); ++i) {
      for (Eigen::Index j = 0; j < rho.kernel.cols(); ++j) {
        write_f64(out, rho.kernel(i, j).real());
        write_f64(out, rho.kernel(i, j).imag());
      }
    }
  }
  nlohmann::ordered_json side;
  side["trace"] = rho.trace().real();
  side["trace_imag"] = rho.trace().imag();
  side["min_eigenvalue"] = rho.min_eigenvalue();
  side["hermiticity_defect"] = rho.hermiticity_defect();
  std::ofstream js(path.string() + ".json");
  js << side.dump(2) << '\n';
}

DensityMatrix1 load_density(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_density: cannot open " + path.string());
  const ContainerHeader h = read_header(in, {'R', 'B', 'Q', '1'});
  if (h.axes != 2) throw FormatError("N", "density container must have N = 2, got " + std::to_string(h.axes));
  DensityMatrix1 rho{CMatrix(h.points, h.points), make_grid(h.length, h.points, h.hbar)};
  for (Eigen::Index i = 0; i < rho.kernel.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho.kernel.cols(); ++j) {
      const double re = read_f64(in, "payload");
      const double im = read_f64(in, "payload");
      rho.kernel(i, j) = {re, im};
    }
  }
  return rho;
}

}  // namespace rbq
