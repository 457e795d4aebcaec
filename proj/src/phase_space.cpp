#include "phase_space.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace rbq::detail {
namespace {

std::size_t wrap(long i, std::size_t m) {
  const long mm = static_cast<long>(m);
  return static_cast<std::size_t>(((i % mm) + mm) % mm);
}

CMatrix build_half_shift(const GridSpec& g) {
  const std::size_t m = g.points();
  const double dx = g.dx();
  std::vector<double> row(m, 0.0);
  for (std::size_t d = 0; d < m; ++d) {
    double s = 0.0;
    for (std::size_t q = 0; q < m; ++q) {
      const long sq = g.signed_mode(q);
      if (2 * static_cast<std::size_t>(std::labs(sq)) == m) continue;  // Nyquist: cos(pi/2) = 0
      const double k = 2.0 * std::numbers::pi * static_cast<double>(sq) / g.length();
      s += std::cos(k * (static_cast<double>(d) * dx + 0.5 * dx));
    }
    row[d] = s / static_cast<double>(m);
  }
  CMatrix out(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out(i, j) = row[(i + m - j) % m];
  return out;
}

// DFT from signed separation index m (column m + M/2) to ordered momentum k.
const CMatrix& dft_table(std::size_t m) {
  static std::mutex mu;
  static std::map<std::size_t, CMatrix> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  CMatrix t(m, m);
  const long half = static_cast<long>(m / 2);
  for (std::size_t mi = 0; mi < m; ++mi) {
    const long sm = static_cast<long>(mi) - half;
    for (std::size_t k = 0; k < m; ++k) {
      const long sk = static_cast<long>(k) - half;
      const long prod = ((sm * sk) % static_cast<long>(m) + static_cast<long>(m)) % static_cast<long>(m);
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(prod) / static_cast<double>(m);
      t(mi, k) = cplx(std::cos(ang), std::sin(ang));
    }
  }
  return cache.emplace(m, std::move(t)).first->second;
}

}  // namespace

const CMatrix& half_shift(const GridSpec& g) {
  static std::mutex mu;
  static std::map<std::tuple<double, std::size_t>, CMatrix> cache;
  std::lock_guard lock(mu);
  const auto key = std::make_tuple(g.length(), g.points());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  return cache.emplace(key, build_half_shift(g)).first->second;
}

CMatrix wigner_map(const CMatrix& r, const GridSpec& g) {
  const std::size_t m = g.points();
  const long half = static_cast<long>(m / 2);
  const long quarter = static_cast<long>(m / 4);
  const CMatrix& shift = half_shift(g);
  const CMatrix r_half = shift * r * shift.transpose();

  // samples(j, m + M/2) = s(x_j + m dx/2, x_j - m dx/2)
  CMatrix samples(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    const long jj = static_cast<long>(j);
    for (long sm = -half; sm < half; ++sm) {
      cplx v;
      if (sm == -half) {
        v = 0.5 * (r(wrap(jj - quarter, m), wrap(jj + quarter, m)) +
                   r(wrap(jj + quarter, m), wrap(jj - quarter, m)));
      } else if (sm % 2 == 0) {
        const long p = sm / 2;
        v = r(wrap(jj + p, m), wrap(jj - p, m));
      } else {
        const long p = (sm - 1) / 2;  // floor for odd negatives too
        v = r_half(wrap(jj + p, m), wrap(jj - p - 1, m));
      }
      samples(j, static_cast<std::size_t>(sm + half)) = v;
    }
  }
  const double c = g.dx() / (2.0 * std::numbers::pi * g.hbar());
  return c * (samples * dft_table(m));
}

CMatrix wigner_adjoint(const CMatrix& a, const GridSpec& g) {
  const std::size_t m = g.points();
  const long half = static_cast<long>(m / 2);
  const long quarter = static_cast<long>(m / 4);
  const double c = g.dx() / (2.0 * std::numbers::pi * g.hbar());
  // dft_table is symmetric in its two signed indices.
  const CMatrix gjm = c * (a * dft_table(m).transpose());

  CMatrix coeff = CMatrix::Zero(m, m);
  CMatrix coeff_half = CMatrix::Zero(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    const long jj = static_cast<long>(j);
    for (long sm = -half; sm < half; ++sm) {
      const cplx v = gjm(j, static_cast<std::size_t>(sm + half));
      if (sm == -half) {
        coeff(wrap(jj - quarter, m), wrap(jj + quarter, m)) += 0.5 * v;
        coeff(wrap(jj + quarter, m), wrap(jj - quarter, m)) += 0.5 * v;
      } else if (sm % 2 == 0) {
        const long p = sm / 2;
        coeff(wrap(jj + p, m), wrap(jj - p, m)) += v;
      } else {
        const long p = (sm - 1) / 2;
        coeff_half(wrap(jj + p, m), wrap(jj - p - 1, m)) += v;
      }
    }
  }
  const CMatrix& shift = half_shift(g);
  coeff += shift.transpose() * coeff_half * shift;
  return (g.dxi() / g.dx()) * coeff.transpose();
}

}  // namespace rbq::detail
