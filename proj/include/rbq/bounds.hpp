#pragma once

#include <cstddef>
#include <vector>

#include "rbq/grid.hpp"

namespace rbq {

struct BoundInputs {
  double t = 0.0;
  double dt = 0.0;
  std::size_t dconf = 1;
  double lambda = 0.0;
  double lconst = 0.0;
  double gamma_d = 1.0;
  std::size_t n = 2;
  double hbar = 1.0;
  double sup_norm = 0.0;
};

/// Throws std::invalid_argument for negative inputs, dconf != 1 or hbar <= 0.
void validate(const BoundInputs& b);

/// 2 gamma dt exp(6t max(1, sqrt(d) L)) Lambda (2 + 3t Lambda max(1, dt) + 4 sqrt(d) L t dt).
double theorem_rhs(const BoundInputs& b);

/// (2N/hbar) dt |V| (1 + N t |V| / hbar).
double naive_trace_rhs(const BoundInputs& b);

struct LemmaCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Sum over DFT modes of |k_q| |f_hat_q| / M with k_q = 2 pi q / L.
double discrete_lambda(const std::vector<double>& f, const GridSpec& g);

/// |[f, T]| against Lambda(f) |[x, T]| with x the minimal-image position.
LemmaCheck commutator_lemma_check(const std::vector<double>& f, const OperatorMatrix& t, const GridSpec& g);
/// Complex samples are accepted only to reject them.
LemmaCheck commutator_lemma_check(const std::vector<cplx>& f, const OperatorMatrix& t, const GridSpec& g);

}  // namespace rbq
