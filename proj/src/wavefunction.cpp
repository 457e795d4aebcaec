#include "rbq/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rbq/container.hpp"
#include "rbq/simd/kernels.hpp"
#include "tensor_ops.hpp"

namespace rbq {

std::size_t checked_tensor_size(std::size_t particles, std::size_t points, std::size_t cap) {
  if (particles == 0) throw std::invalid_argument("state: need at least one particle");
  std::size_t size = 1;
  for (std::size_t i = 0; i < particles; ++i) {
    if (size > cap / points) {
      throw std::length_error("state: M^N exceeds the amplitude cap of " + std::to_string(cap));
    }
    size *= points;
  }
  if (size > cap / particles) {
    throw std::length_error("state: N * M^N = " + std::to_string(size) + " * " + std::to_string(particles) +
                            " exceeds the amplitude cap of " + std::to_string(cap));
  }
  return size;
}

WaveFunctionN::WaveFunctionN(const GridSpec& g, std::size_t particles, std::size_t cap)
    : grid_(g), particles_(particles), amps_(checked_tensor_size(particles, g.points(), cap), cplx{}) {}

double WaveFunctionN::norm() const {
  const double w = std::pow(grid_.dx(), static_cast<double>(particles_));
  return std::sqrt(w * simd::kernels().norm_sq(amps_.data(), amps_.size()));
}

void WaveFunctionN::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw std::domain_error("state: cannot normalize a zero state");
  simd::kernels().cmul_scalar(amps_.data(), cplx(1.0 / n, 0.0), amps_.size());
}

cplx WaveFunctionN::inner(const WaveFunctionN& other) const {
  if (other.size() != size()) throw std::invalid_argument("state: shape mismatch");
  const double w = std::pow(grid_.dx(), static_cast<double>(particles_));
  return w * simd::kernels().dot_conj(other.data(), data(), size());
}

double WaveFunctionN::distance(const WaveFunctionN& other) const {
  if (other.size() != size()) throw std::invalid_argument("state: shape mismatch");
  const double w = std::pow(grid_.dx(), static_cast<double>(particles_));
  return std::sqrt(w * simd::kernels().dist_sq(data(), other.data(), size()));
}

WaveFunctionN WaveFunctionN::product(const GridSpec& g, std::span<const std::vector<cplx>> orbitals,
                                     std::size_t cap) {
  const std::size_t n = orbitals.size();
  const std::size_t m = g.points();
  for (const auto& o : orbitals) {
    if (o.size() != m) throw std::invalid_argument("product state: orbital length must equal M");
  }
  WaveFunctionN psi(g, n, cap);
  // Outer product built axis by axis, particle 0 slowest.
  std::size_t filled = 1;
  psi.amps_[0] = 1.0;
  for (std::size_t axis = 0; axis < n; ++axis) {
    for (std::size_t i = filled; i-- > 0;) {
      const cplx base = psi.amps_[i];
      for (std::size_t q = 0; q < m; ++q) psi.amps_[i * m + q] = base * orbitals[axis][q];
    }
    filled *= m;
  }
  return psi;
}

WaveFunctionN WaveFunctionN::permuted_axes(std::span<const std::size_t> perm) const {
  if (perm.size() != particles_) throw std::invalid_argument("permuted_axes: permutation size mismatch");
  const std::size_t m = grid_.points();
  WaveFunctionN out(grid_, particles_);
  std::vector<std::size_t> stride(particles_);
  for (std::size_t a = 0; a < particles_; ++a) stride[a] = detail::ipow(m, particles_ - 1 - a);
  std::vector<std::size_t> idx(particles_, 0);
  for (std::size_t flat = 0; flat < amps_.size(); ++flat) {
    std::size_t target = 0;
    for (std::size_t a = 0; a < particles_; ++a) target += idx[a] * stride[perm[a]];
    out.amps_[target] = amps_[flat];
    for (std::size_t a = particles_; a-- > 0;) {
      if (++idx[a] < m) break;
      idx[a] = 0;
    }
  }
  return out;
}

WaveFunctionN WaveFunctionN::symmetrized() const {
  if (particles_ > 8) throw std::invalid_argument("symmetrized: N <= 8 required");
  std::vector<std::size_t> perm(particles_);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  WaveFunctionN acc(grid_, particles_);
  do {
    const WaveFunctionN p = permuted_axes(perm);
    for (std::size_t i = 0; i < amps_.size(); ++i) acc.amps_[i] += p.amps_[i];
  } while (std::next_permutation(perm.begin(), perm.end()));
  acc.normalize();
  return acc;
}

std::vector<cplx> gaussian_orbital(const GridSpec& g, double center, double sigma, double momentum) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_orbital: width must be positive");
  const std::size_t m = g.points();
  std::vector<cplx> out(m);
  const double pref = std::pow(std::numbers::pi * sigma * sigma, -0.25);
  for (std::size_t j = 0; j < m; ++j) {
    // minimal image of x - c so packets near the boundary stay periodic-smooth
    double d = g.x(j) - center;
    d -= g.length() * std::round(d / g.length());
    const double phase = momentum * (center + d) / g.hbar();
    out[j] = pref * std::exp(-d * d / (2.0 * sigma * sigma)) * cplx(std::cos(phase), std::sin(phase));
  }
  double s = 0.0;
  for (const cplx& v : out) s += std::norm(v);
  const double scale = 1.0 / std::sqrt(s * g.dx());
  for (cplx& v : out) v *= scale;
  return out;
}

void save_state(const WaveFunctionN& psi, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_state: cannot open " + path.string());
  write_header(out, {{'R', 'B', 'Q', '1'},
                     static_cast<std::uint32_t>(psi.particles()),
                     static_cast<std::uint32_t>(psi.grid().points()),
                     psi.grid().length(),
                     psi.grid().hbar()});
  for (const cplx& v : psi.amplitudes()) {
    write_f64(out, v.real());
    write_f64(out, v.imag());
  }
  if (!out) throw std::runtime_error("save_state: write failed for " + path.string());
}

WaveFunctionN load_state(const std::filesystem::path& path, std::size_t cap) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_state: cannot open " + path.string());
  const ContainerHeader h = read_header(in, {'R', 'B', 'Q', '1'});
  const GridSpec g = make_grid(h.length, h.points, h.hbar);
  WaveFunctionN psi;
  try {
    psi = WaveFunctionN(g, h.axes, cap);
  } catch (const std::length_error& e) {
    throw FormatError("N", e.what());
  }
  for (cplx& v : psi.amplitudes()) {
    const double re = read_f64(in, "payload");
    const double im = read_f64(in, "payload");
    v = {re, im};
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("payload", "trailing bytes after M^N amplitudes");
  return psi;
}

}  // namespace rbq
