#include "rbq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rbq {

void validate(const BoundInputs& b) {
  if (b.t < 0 || b.dt < 0 || b.lambda < 0 || b.lconst < 0 || b.gamma_d < 0 || b.sup_norm < 0) {
    throw std::invalid_argument("BoundInputs: negative input");
  }
  if (b.dconf != 1) throw std::invalid_argument("BoundInputs: only dconf = 1 is supported");
  if (!(b.hbar > 0)) throw std::invalid_argument("BoundInputs: hbar must be positive");
}

double theorem_rhs(const BoundInputs& b) {
  validate(b);
  const double sd = std::sqrt(static_cast<double>(b.dconf));
  return 2.0 * b.gamma_d * b.dt * std::exp(6.0 * b.t * std::max(1.0, sd * b.lconst)) * b.lambda *
         (2.0 + 3.0 * b.t * b.lambda * std::max(1.0, b.dt) + 4.0 * sd * b.lconst * b.t * b.dt);
}

double naive_trace_rhs(const BoundInputs& b) {
  validate(b);
  const double n = static_cast<double>(b.n);
  return (2.0 * n / b.hbar) * b.dt * b.sup_norm * (1.0 + n * b.t * b.sup_norm / b.hbar);
}

double discrete_lambda(const std::vector<double>& f, const GridSpec& g) {
  const std::size_t m = g.points();
  if (f.size() != m) throw std::invalid_argument("discrete_lambda: size mismatch");
  double total = 0.0;
  for (std::size_t q = 0; q < m; ++q) {
    cplx c{};
    for (std::size_t j = 0; j < m; ++j) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>((q * j) % m) / static_cast<double>(m);
      c += f[j] * cplx(std::cos(ang), std::sin(ang));
    }
    const double k = 2.0 * std::numbers::pi * static_cast<double>(std::abs(g.signed_mode(q))) / g.length();
    total += k * std::abs(c) / static_cast<double>(m);
  }
  return total;
}

LemmaCheck commutator_lemma_check(const std::vector<double>& f, const OperatorMatrix& t, const GridSpec& g) {
  const auto m = static_cast<Eigen::Index>(g.points());
  if (static_cast<Eigen::Index>(f.size()) != m || t.kernel.rows() != m || t.kernel.cols() != m) {
    throw std::invalid_argument("commutator_lemma_check: grid mismatch");
  }
  const CMatrix tm = t.matrix();
  CMatrix fc(m, m), xc(m, m);
  const CMatrix x = position_matrix(g);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      fc(i, j) = (f[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(j)]) * tm(i, j);
      xc(i, j) = (x(i, i) - x(j, j)) * tm(i, j);
    }
  LemmaCheck r;
  r.lhs = operator_norm(fc);
  r.rhs = discrete_lambda(f, g) * operator_norm(xc);
  r.holds = r.lhs <= r.rhs * (1.0 + 1e-8);
  return r;
}

LemmaCheck commutator_lemma_check(const std::vector<cplx>& f, const OperatorMatrix& t, const GridSpec& g) {
  std::vector<double> re(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].imag() != 0.0) throw std::invalid_argument("commutator_lemma_check: f must be real");
    re[i] = f[i].real();
  }
  return commutator_lemma_check(re, t, g);
}

}  // namespace rbq
