#include "rbq/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "phase_space.hpp"
#include "rbq/container.hpp"

namespace rbq {

double WignerGrid::purity() const {
  return 2.0 * std::numbers::pi * grid.hbar() * grid.dx() * grid.dxi() * values.squaredNorm();
}

WignerGrid wigner(const CMatrix& kernel, const GridSpec& g) {
  const auto m = static_cast<Eigen::Index>(g.points());
  if (kernel.rows() != m || kernel.cols() != m) throw std::invalid_argument("wigner: grid mismatch");
  const CMatrix w = detail::wigner_map(kernel, g);
  return {w.real(), g, w.imag().cwiseAbs().maxCoeff()};
}

WignerGrid wigner(const DensityMatrix1& rho, const GridSpec& g) {
  if (!(rho.grid == g)) throw std::invalid_argument("wigner: grid mismatch");
  return wigner(rho.kernel, g);
}

double gaussian_derivative_sup(std::size_t k) {
  switch (k) {
    case 0: return 1.0;
    case 1: return std::exp(-0.5);
    case 2: return 1.0;
    case 3: {
      // |u^3 - 3u| e^{-u^2/2} peaks at u^2 = 3 - sqrt(6)
      const double u2 = 3.0 - std::sqrt(6.0);
      return std::sqrt(u2) * std::sqrt(6.0) * std::exp(-0.5 * u2);
    }
    default:
      throw std::invalid_argument("gaussian_derivative_sup: orders above 3 are not tabulated");
  }
}

namespace {

std::vector<double> log_spaced_signed(double lo, double hi, std::size_t count, bool integer_valued) {
  // count = 1 + 2 * positives: zero plus a symmetric log-spaced ladder
  std::vector<double> pos;
  const std::size_t npos = count / 2;
  for (std::size_t i = 0; i < npos; ++i) {
    const double f = npos == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(npos - 1);
    double v = lo * std::pow(hi / lo, f);
    if (integer_valued) v = std::max(1.0, std::round(v));
    pos.push_back(v);
  }
  std::ranges::sort(pos);
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  std::vector<double> out{0.0};
  for (double v : pos) {
    out.push_back(v);
    out.push_back(-v);
  }
  return out;
}

double derivative_table_max(std::size_t order, auto&& sup_of) {
  double best = 0.0;
  for (std::size_t a = 0; a <= order; ++a)
    for (std::size_t b = 0; b <= order; ++b)
      if (a + b > 0) best = std::max(best, sup_of(a, b));
  return best;
}

}  // namespace

SymbolDictionary make_dictionary(const GridSpec& g, const DictionaryConfig& cfg) {
  if (cfg.order == 0) throw std::invalid_argument("make_dictionary: order must be >= 1");
  SymbolDictionary dict;
  dict.order = cfg.order;
  const std::size_t m = g.points();
  const auto mi = static_cast<Eigen::Index>(m);
  const double two_pi = 2.0 * std::numbers::pi;

  if (cfg.plane_waves_per_axis > 0) {
    // x wavenumbers are multiples of 2 pi / L so every symbol is periodic in x
    const std::vector<double> kmodes =
        log_spaced_signed(1.0, static_cast<double>(m / 2), cfg.plane_waves_per_axis, true);
    const std::vector<double> etas =
        log_spaced_signed(g.dx() / g.hbar(), 0.5 * g.length() / g.hbar(), cfg.plane_waves_per_axis, false);
    for (double kn : kmodes) {
      const double k = two_pi * kn / g.length();
      for (double eta : etas) {
        if (kn == 0.0 && eta == 0.0) continue;
        const double norm = derivative_table_max(cfg.order, [&](std::size_t a, std::size_t b) {
          return std::pow(std::abs(k), static_cast<double>(a)) * std::pow(std::abs(eta), static_cast<double>(b));
        });
        SymbolDictionary::Symbol s;
        s.samples.resize(mi, mi);
        for (std::size_t j = 0; j < m; ++j)
          for (std::size_t q = 0; q < m; ++q) {
            const double ang = k * g.x(j) + eta * g.xi(q);
            s.samples(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(q)) =
                cplx(std::cos(ang), std::sin(ang)) / norm;
          }
        s.scale = 1.0 / norm;
        std::ostringstream os;
        os << "plane(k=" << k << ",eta=" << eta << ")";
        s.label = os.str();
        dict.symbols.push_back(std::move(s));
      }
    }
  }

  if (cfg.gaussians_x > 0 && cfg.gaussians_xi > 0) {
    if (cfg.order > 3) throw std::invalid_argument("make_dictionary: gaussian bumps support order <= 3");
    const double xi_span = static_cast<double>(m) * g.dxi();
    const double sx = g.length() / static_cast<double>(cfg.gaussians_x);
    const double sxi = xi_span / static_cast<double>(cfg.gaussians_xi);
    const double norm = derivative_table_max(cfg.order, [&](std::size_t a, std::size_t b) {
      return gaussian_derivative_sup(a) * gaussian_derivative_sup(b) / std::pow(sx, static_cast<double>(a)) /
             std::pow(sxi, static_cast<double>(b));
    });
    for (std::size_t cx = 0; cx < cfg.gaussians_x; ++cx) {
      const double x0 = -0.5 * g.length() + (static_cast<double>(cx) + 0.5) * sx;
      for (std::size_t cxi = 0; cxi < cfg.gaussians_xi; ++cxi) {
        const double xi0 = -0.5 * xi_span + (static_cast<double>(cxi) + 0.5) * sxi;
        SymbolDictionary::Symbol s;
        s.samples.resize(mi, mi);
        for (std::size_t j = 0; j < m; ++j) {
          double d = g.x(j) - x0;
          d -= g.length() * std::round(d / g.length());
          for (std::size_t q = 0; q < m; ++q) {
            const double e = g.xi(q) - xi0;
            s.samples(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(q)) =
                std::exp(-0.5 * d * d / (sx * sx) - 0.5 * e * e / (sxi * sxi)) / norm;
          }
        }
        s.scale = 1.0 / norm;
        std::ostringstream os;
        os << "gauss(x0=" << x0 << ",xi0=" << xi0 << ")";
        s.label = os.str();
        dict.symbols.push_back(std::move(s));
      }
    }
  }
  return dict;
}

std::vector<cplx> pair_with_dictionary(const RMatrix& w, const GridSpec& g, const SymbolDictionary& dict) {
  const double weight = g.dx() * g.dxi();
  std::vector<cplx> out;
  out.reserve(dict.symbols.size());
  for (const auto& s : dict.symbols) {
    if (s.samples.rows() != w.rows() || s.samples.cols() != w.cols()) {
      throw std::invalid_argument("pair_with_dictionary: symbol shape mismatch");
    }
    out.push_back(weight * (w.cast<cplx>().cwiseProduct(s.samples.conjugate())).sum());
  }
  return out;
}

double dual_norm_lower_bound(const WignerGrid& w, std::size_t order, const SymbolDictionary& dict) {
  if (dict.symbols.empty()) throw std::invalid_argument("dual_norm_lower_bound: empty dictionary");
  if (dict.order != order) throw std::invalid_argument("dual_norm_lower_bound: dictionary normalized for another order");
  double best = 0.0;
  for (const cplx& v : pair_with_dictionary(w.values, w.grid, dict)) best = std::max(best, std::abs(v));
  return best;
}

double commutator_budget(const CMatrix& a, const GridSpec& g) {
  static thread_local GridSpec cached_grid;
  static thread_local CMatrix x, p;
  if (!(cached_grid == g)) {
    x = position_matrix(g);
    p = momentum_matrix(g);
    cached_grid = g;
  }
  auto comm = [](const CMatrix& u, const CMatrix& v) -> CMatrix { return u * v - v * u; };
  const CMatrix xa = comm(x, a);
  const CMatrix pa = comm(p, a);
  const double h = g.hbar();
  return h * operator_norm(xa) + h * operator_norm(pa) + operator_norm(comm(x, xa)) + operator_norm(comm(p, xa)) +
         operator_norm(comm(p, pa));
}

DhbarEstimator::DhbarEstimator(const SymbolDictionary& dict, const GridSpec& g) : grid_(g) {
  const double target = 5.0 * g.hbar() * g.hbar();
  for (const auto& s : dict.symbols) {
    CMatrix a = weyl_quantize(s.samples, g).matrix();
    const double budget = commutator_budget(a, g);
    // A zero budget means A is a multiple of the identity, which pairs to 0.
    if (!(budget > 0.0)) continue;
    ops_.push_back(a * (target / budget));
  }
}

double DhbarEstimator::operator()(const DensityMatrix1& rho, const DensityMatrix1& sigma) const {
  if (!(rho.grid == grid_) || !(sigma.grid == grid_)) throw std::invalid_argument("dhbar_lower_bound: grid mismatch");
  const CMatrix diff = (rho.kernel - sigma.kernel) * grid_.dx();
  double best = 0.0;
  for (const CMatrix& a : ops_) best = std::max(best, std::abs((diff.cwiseProduct(a.transpose())).sum()));
  return best;
}

double dhbar_lower_bound(const DensityMatrix1& rho, const DensityMatrix1& sigma, const SymbolDictionary& dict) {
  if (!(rho.grid == sigma.grid)) throw std::invalid_argument("dhbar_lower_bound: grid mismatch");
  return DhbarEstimator(dict, rho.grid)(rho, sigma);
}

void write_wigner_csv(const WignerGrid& w, std::ostream& out) {
  out << "x,xi,value\n" << std::setprecision(17);
  for (Eigen::Index j = 0; j < w.values.rows(); ++j)
    for (Eigen::Index k = 0; k < w.values.cols(); ++k)
      out << w.grid.x(static_cast<std::size_t>(j)) << ',' << w.grid.xi(static_cast<std::size_t>(k)) << ','
          << w.values(j, k) << '\n';
}

void save_wigner(const WignerGrid& w, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_wigner: cannot open " + path.string());
  write_header(out, {{'W', 'I', 'G', '1'}, 2, static_cast<std::uint32_t>(w.grid.points()), w.grid.length(),
                     w.grid.hbar()});
  for (Eigen::Index j = 0; j < w.values.rows(); ++j)
    for (Eigen::Index k = 0; k < w.values.cols(); ++k) write_f64(out, w.values(j, k));
}

WignerGrid load_wigner(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_wigner: cannot open " + path.string());
  const ContainerHeader h = read_header(in, {'W', 'I', 'G', '1'});
  if (h.axes != 2) throw FormatError("N", "Wigner container must have N = 2");
  WignerGrid w{RMatrix(h.points, h.points), make_grid(h.length, h.points, h.hbar), 0.0};
  for (Eigen::Index j = 0; j < w.values.rows(); ++j)
    for (Eigen::Index k = 0; k < w.values.cols(); ++k) w.values(j, k) = read_f64(in, "payload");
  return w;
}

}  // namespace rbq
