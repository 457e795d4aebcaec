#include "rbq/potential.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "rbq/simd/kernels.hpp"
#include "tensor_ops.hpp"

namespace rbq {
namespace {

double sinc_pi(double u) { return u == 0.0 ? 1.0 : std::sin(std::numbers::pi * u) / (std::numbers::pi * u); }

// Fourier transform of the band-limited interpolant, valid for |w| < pi/h.
double tabulated_transform(const PotentialSpec& s, double w) {
  double acc = s.samples[0];
  for (std::size_t i = 1; i < s.samples.size(); ++i) {
    acc += 2.0 * s.samples[i] * std::cos(w * static_cast<double>(i) * s.spacing);
  }
  return s.spacing * acc;
}

}  // namespace

PotentialSpec PotentialSpec::gaussian(double amplitude, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian potential: width must be positive");
  PotentialSpec s;
  s.kind = Kind::gaussian;
  s.amplitude = amplitude;
  s.width = width;
  return s;
}

PotentialSpec PotentialSpec::cosine(double amplitude, double wavenumber) {
  PotentialSpec s;
  s.kind = Kind::cosine;
  s.amplitude = amplitude;
  s.wavenumber = wavenumber;
  return s;
}

PotentialSpec PotentialSpec::tabulated(std::vector<double> samples, double spacing) {
  if (samples.size() < 2) throw std::invalid_argument("tabulated potential: need at least two samples");
  if (!(spacing > 0.0)) throw std::invalid_argument("tabulated potential: spacing must be positive");
  PotentialSpec s;
  s.kind = Kind::tabulated;
  s.samples = std::move(samples);
  s.spacing = spacing;
  return s;
}

double PotentialSpec::operator()(double z) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::gaussian:
      return amplitude * std::exp(-z * z / (2.0 * width * width));
    case Kind::cosine:
      return amplitude * std::cos(wavenumber * z);
    case Kind::tabulated: {
      const double u = z / spacing;
      double acc = samples[0] * sinc_pi(u);
      for (std::size_t i = 1; i < samples.size(); ++i) {
        const auto di = static_cast<double>(i);
        acc += samples[i] * (sinc_pi(u - di) + sinc_pi(u + di));
      }
      return acc;
    }
  }
  return 0.0;
}

std::string PotentialSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::zero: os << "zero"; break;
    case Kind::gaussian: os << "gaussian(alpha=" << amplitude << ", w=" << width << ")"; break;
    case Kind::cosine: os << "cosine(alpha=" << amplitude << ", k=" << wavenumber << ")"; break;
    case Kind::tabulated: os << "tabulated(" << samples.size() << " samples, h=" << spacing << ")"; break;
  }
  return os.str();
}

PotentialConstants potential_constants(const PotentialSpec& spec) {
  switch (spec.kind) {
    case PotentialSpec::Kind::zero:
      return {};
    case PotentialSpec::Kind::gaussian: {
      // V^(w) = alpha w sqrt(2 pi) exp(-w^2 w'^2 / 2)
      const double a = std::abs(spec.amplitude);
      const double w = spec.width;
      return {a * std::sqrt(2.0 / std::numbers::pi) / w, a / (w * w), a};
    }
    case PotentialSpec::Kind::cosine: {
      // V^ = alpha pi (delta(w - k) + delta(w + k))
      const double a = std::abs(spec.amplitude);
      const double k = std::abs(spec.wavenumber);
      return {a * k, a * k * k, a};
    }
    case PotentialSpec::Kind::tabulated: {
      const double peak = std::ranges::max(spec.samples, {}, [](double v) { return std::abs(v); });
      const double tail = std::abs(spec.samples.back());
      if (std::abs(peak) == 0.0) return {};
      if (tail > 1e-8 * std::abs(peak)) {
        throw std::domain_error("potential_constants: tabulated potential does not decay (last sample " +
                                std::to_string(spec.samples.back()) + ")");
      }
      using boost::math::quadrature::gauss_kronrod;
      const double band = std::numbers::pi / spec.spacing;
      double err1 = 0.0, err2 = 0.0;
      const double m1 = gauss_kronrod<double, 61>::integrate(
          [&](double w) { return w * std::abs(tabulated_transform(spec, w)); }, 0.0, band, 20, 1e-12, &err1);
      const double m2 = gauss_kronrod<double, 61>::integrate(
          [&](double w) { return w * w * std::abs(tabulated_transform(spec, w)); }, 0.0, band, 20, 1e-12,
          &err2);
      if (err1 > 1e-8 * std::max(m1, 1e-300) || err2 > 1e-8 * std::max(m2, 1e-300)) {
        throw std::domain_error("potential_constants: quadrature did not converge");
      }
      // Even integrand: (1/2pi) * 2 * int_0^band
      double sup = 0.0;
      const std::size_t fine = 16 * spec.samples.size();
      const double zmax = static_cast<double>(spec.samples.size()) * spec.spacing;
      for (std::size_t i = 0; i <= fine; ++i) sup = std::max(sup, std::abs(spec(zmax * static_cast<double>(i) / static_cast<double>(fine))));
      return {m1 / std::numbers::pi, m2 / std::numbers::pi, sup};
    }
  }
  return {};
}

InteractionMode InteractionMode::full(std::size_t particles) {
  InteractionMode mode;
  for (std::size_t l = 0; l < particles; ++l)
    for (std::size_t n = l + 1; n < particles; ++n) mode.pairs.emplace_back(l, n);
  mode.coupling = particles > 1 ? 1.0 / static_cast<double>(particles - 1) : 1.0;
  return mode;
}

InteractionMode InteractionMode::partition(const PairPartition& p) {
  InteractionMode mode;
  mode.pairs = p.pairs();
  mode.coupling = 1.0;
  mode.batched = true;
  return mode;
}

std::vector<double> pair_table(const PotentialSpec& spec, const GridSpec& g) {
  const std::size_t m = g.points();
  std::vector<double> table(m);
  for (std::size_t d = 0; d < m; ++d) {
    const long sd = d <= m / 2 ? static_cast<long>(d) : static_cast<long>(d) - static_cast<long>(m);
    table[d] = spec(static_cast<double>(sd) * g.dx());
  }
  return table;
}

InteractionDiagonal interaction_diagonal(const PotentialSpec& spec, const GridSpec& g, std::size_t particles,
                                         const InteractionMode& mode) {
  const std::size_t m = g.points();
  if (mode.batched) {
    if (particles % 2 != 0) throw std::invalid_argument("interaction_diagonal: partition mode needs even N");
    std::vector<bool> covered(particles, false);
    for (const auto& [l, n] : mode.pairs) {
      if (n >= particles || covered[l] || covered[n]) {
        throw std::invalid_argument("interaction_diagonal: partition does not match N");
      }
      covered[l] = covered[n] = true;
    }
    if (mode.pairs.size() * 2 != particles) {
      throw std::invalid_argument("interaction_diagonal: partition does not cover all labels");
    }
  }
  for (const auto& [l, n] : mode.pairs) {
    if (l >= n || n >= particles) throw std::invalid_argument("interaction_diagonal: invalid pair");
  }
  InteractionDiagonal out;
  out.values.assign(detail::ipow(m, particles), 0.0);

  const std::vector<double> table = pair_table(spec, g);
  // circulant rows: rows[il * m + in] = coupling * V(x_il - x_in)
  std::vector<double> rows(m * m);
  for (std::size_t il = 0; il < m; ++il)
    for (std::size_t in = 0; in < m; ++in) rows[il * m + in] = mode.coupling * table[(il + m - in) % m];

  const auto& k = simd::kernels();
  for (const auto& [l, n] : mode.pairs) {
    detail::visit_pair_runs(particles, m, l, n, [&](std::size_t base, std::size_t il, std::size_t inner) {
      double* dst = out.values.data() + base;
      const double* row = rows.data() + il * m;
      if (inner == 1) {
        k.radd(dst, row, m);
      } else {
        for (std::size_t in = 0; in < m; ++in) k.radd_scalar(dst + in * inner, row[in], inner);
      }
    });
    ++out.pair_evaluations;
  }
  return out;
}

}  // namespace rbq
