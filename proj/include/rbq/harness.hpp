#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbq/config.hpp"
#include "rbq/density.hpp"

namespace rbq {

struct SweepRow {
  std::string kind;  ///< "converge" or "hbar"
  std::size_t particles = 0;
  std::size_t points = 0;
  double hbar = 0.0;
  double dt = 0.0;
  std::size_t realizations = 0;
  /// |E R~_1(t) - R_1(t)|_1 with R_1 from the full dynamics on the same substep length.
  double trace_distance = 0.0;
  double trace_distance_se = 0.0;
  /// Dictionary lower bound of the order-3 dual norm of the Wigner difference.
  double dual_norm = 0.0;
  double dual_norm_se = 0.0;
  /// Dictionary lower bound of d_hbar; NaN above kDhbarMaxPoints.
  double dhbar = 0.0;
  /// Mean single-realization trace distance (fluctuation diagnostic).
  double spread = 0.0;
  /// Trace distance between the matched reference and the refinement-validated one.
  double integrator_offset = 0.0;
  double theorem_rhs = 0.0;
  double naive_trace_rhs = 0.0;
  std::size_t pair_evals_full = 0;
  std::size_t pair_evals_rb = 0;
  double wall_full = 0.0;
  double wall_rb = 0.0;
};

/// The d_hbar surrogate needs O(M^3) work per dictionary symbol.
inline constexpr std::size_t kDhbarMaxPoints = 64;

struct CheckItem {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct RunDiagnostics {
  double max_norm_drift_rate = 0.0;  ///< |norm - 1| / t over every propagation
  double max_hermiticity_defect = 0.0;
  double max_trace_error = 0.0;
  double min_eigenvalue = 0.0;
  double max_boundary_mass = 0.0;
  double refine_change = 0.0;
  double max_imag_residue = 0.0;
  std::vector<std::string> warnings;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Least-squares slope of log(trace distance) against log(dt); NaN with < 2 usable rows.
  double slope = 0.0;
  double slope_dual = 0.0;
  PotentialConstants constants;
  RunDiagnostics diagnostics;
  std::vector<CheckItem> checks;
  /// Ensemble mean and matched reference of the last row, for optional dumps.
  DensityMatrix1 last_mean;
  DensityMatrix1 last_reference;
  bool all_passed() const;
};

/// Fit of log(y) = a + slope log(x) over points with x, y > 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Throws std::length_error on cap violations and std::runtime_error when the
/// refinement check fails.
SweepResult run_convergence_sweep(const RunConfig& cfg);
/// Rows per (hbar_sweep.hbars[i], hbar_sweep.points[i]) at dt = hbar_sweep.dt.
SweepResult run_hbar_sweep(const RunConfig& cfg);
SweepResult run_hbar_sweep(const RunConfig& cfg, const std::vector<double>& hbars,
                           const std::vector<std::size_t>& points);

struct FreeEvolutionCheck {
  double variance = 0.0;
  double expected = 0.0;
  double boundary_mass = 0.0;
  bool passed = false;
};
/// One Gaussian of width 1 evolved freely for t: position variance against (1 + hbar^2 t^2) / 2.
FreeEvolutionCheck free_evolution_self_test(const GridSpec& g, double t, double tol);

struct Report {
  std::vector<CheckItem> checks;
  std::vector<std::string> warnings;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
  bool all_passed() const;
};

/// Invariant suite over every module; small fixed sizes plus the config's potential.
Report verify_suite(const RunConfig& cfg);

struct CostRow {
  std::size_t particles = 0;
  std::size_t pair_evals_full = 0;
  std::size_t pair_evals_rb = 0;
  double build_seconds_full = 0.0;  ///< one interaction-diagonal build
  double build_seconds_rb = 0.0;
};
struct ShuffleTiming {
  std::size_t labels = 0;
  double seconds_per_shuffle = 0.0;
};
struct CostReport {
  std::vector<CostRow> rows;
  std::vector<ShuffleTiming> shuffle;
  double shuffle_exponent = 0.0;
  Report report;
};
CostReport run_cost_bench(const RunConfig& cfg);

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Exceptions are
/// rethrown on the caller's thread (lowest index first).
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// Shortest "%g"-style rendering, used in check names and messages.
std::string sci(double v);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);
/// Fixed column order; wall times only when `timings` is set, so that the
/// default output is byte-identical across runs.
void write_rows_csv(const std::vector<SweepRow>& rows, std::ostream& out, bool timings = false);
std::vector<std::string> rows_csv_columns(bool timings = false);

nlohmann::ordered_json summary_json(const SweepResult& r, const RunConfig& cfg, const std::string& command);
nlohmann::ordered_json summary_json(const Report& r, const RunConfig& cfg, const std::string& command);
nlohmann::ordered_json summary_json(const CostReport& r, const RunConfig& cfg);

/// Writes rows.csv (when rows are given) and summary.json into cfg.output_dir.
void write_outputs(const RunConfig& cfg, const std::vector<SweepRow>* rows, const nlohmann::ordered_json& summary,
                   bool timings = false);

}  // namespace rbq
