#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rbq/density.hpp"
#include "rbq/grid.hpp"

namespace rbq {

/// W(x_j, xi_k): rows over positions, columns over ordered momenta.
struct WignerGrid {
  RMatrix values;
  GridSpec grid;
  /// Largest |Im W| discarded when the transform was taken.
  double imag_residue = 0.0;

  double mass() const { return grid.dx() * grid.dxi() * values.sum(); }
  /// 2 pi hbar * dx * dxi * sum W^2, equal to trace(rho^2).
  double purity() const;
};

WignerGrid wigner(const DensityMatrix1& rho, const GridSpec& g);
/// Transform of an arbitrary (Hermitian) kernel, e.g. a difference of densities.
WignerGrid wigner(const CMatrix& kernel, const GridSpec& g);

struct DictionaryConfig {
  std::size_t order = 3;
  std::size_t plane_waves_per_axis = 21;
  std::size_t gaussians_x = 8;
  std::size_t gaussians_xi = 8;
};

/// Finite family of test symbols, each scaled so that
/// max_{0 < a + b, a, b <= order} ||d_x^a d_xi^b sym||_inf == 1.
struct SymbolDictionary {
  struct Symbol {
    CPhaseGrid samples;
    std::string label;
    double scale = 1.0;  ///< factor applied to the raw symbol
  };
  std::size_t order = 3;
  std::vector<Symbol> symbols;
};

SymbolDictionary make_dictionary(const GridSpec& g, const DictionaryConfig& cfg = {});

/// sup over k = 1..order of |He_k(u) exp(-u^2/2)|; closed forms, order <= 3.
double gaussian_derivative_sup(std::size_t k);

/// dx * dxi * sum w * conj(a) for every symbol in the dictionary.
std::vector<cplx> pair_with_dictionary(const RMatrix& w, const GridSpec& g, const SymbolDictionary& dict);

/// max over dictionary of |<w, a>|; a certified lower bound of the order-`order` dual norm.
double dual_norm_lower_bound(const WignerGrid& w, std::size_t order, const SymbolDictionary& dict);

/// Quantized dictionary scaled to the commutator budget, reusable across pairs.
class DhbarEstimator {
 public:
  DhbarEstimator(const SymbolDictionary& dict, const GridSpec& g);
  /// max over dictionary of |trace((rho - sigma) A)|; a certified lower bound of d_hbar.
  double operator()(const DensityMatrix1& rho, const DensityMatrix1& sigma) const;
  std::size_t size() const noexcept { return ops_.size(); }

 private:
  GridSpec grid_;
  std::vector<CMatrix> ops_;  // plain matrices, already scaled
};

double dhbar_lower_bound(const DensityMatrix1& rho, const DensityMatrix1& sigma, const SymbolDictionary& dict);

/// Sum of commutator norms hbar|[x,A]| + hbar|[hbar D,A]| + |[x,[x,A]]| + |[hbar D,[x,A]]| + |[hbar D,[hbar D,A]]|.
double commutator_budget(const CMatrix& a, const GridSpec& g);

void write_wigner_csv(const WignerGrid& w, std::ostream& out);
/// Container with magic "WIG1", N = 2, then M*M float64 values, x slowest.
void save_wigner(const WignerGrid& w, const std::filesystem::path& path);
WignerGrid load_wigner(const std::filesystem::path& path);

}  // namespace rbq
