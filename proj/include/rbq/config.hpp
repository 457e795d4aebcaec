#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rbq/potential.hpp"
#include "rbq/propagator.hpp"
#include "rbq/wavefunction.hpp"
#include "rbq/wigner.hpp"

namespace rbq {

struct OrbitalSet {
  std::vector<double> centers;  ///< empty: 1.5 m - 0.75 (N - 1)
  std::vector<double> widths;   ///< empty: all 1
  std::vector<double> momenta;  ///< empty: all 0
};

struct MixtureComponent {
  double weight = 1.0;
  OrbitalSet orbitals;
};

struct InitialStateConfig {
  std::string kind = "product";  ///< "product" or "file"
  OrbitalSet orbitals;
  bool symmetrize = false;
  std::string path;
  /// Convex mixture of product states; overrides `orbitals` when nonempty.
  std::vector<MixtureComponent> mixture;
};

struct SubstepConfig {
  std::string scheme = "suzuki4";  ///< "strang" or "suzuki4"
  std::size_t full_per_unit = 64;
  std::size_t rb_per_step = 16;
  /// When > 0, RB substeps are round(dt * rb_per_unit) per step instead.
  std::size_t rb_per_unit = 0;
  bool refine_check = true;
  double refine_tol = 1e-8;

  SplitScheme split_scheme() const;
  RbSubsteps rb() const { return {rb_per_step, rb_per_unit}; }
};

struct EnsembleConfig {
  std::size_t realizations = 200;
  /// "round_robin": blocks of N - 1 realizations sharing one relabeling per
  /// step; "independent": every realization draws its own partitions.
  std::string sampling = "round_robin";
  std::uint64_t seed = 20190601;
};

struct HbarSweepConfig {
  std::vector<double> hbars{1.0, 0.5, 0.25};
  std::vector<std::size_t> points{32, 64, 128};
  double dt = 0.125;
  /// Free-evolution self-test tolerance on the position variance.
  double self_test_tol = 1e-6;
};

struct CostConfig {
  std::vector<std::size_t> particles{2, 4, 6};
  std::size_t points = 8;
  std::size_t steps = 4;
  std::size_t shuffle_max = 1024;
  /// Total labels shuffled per timing trial (repetitions = work / N).
  std::size_t shuffle_work = std::size_t{1} << 22;
  std::size_t shuffle_trials = 5;
};

struct RunConfig {
  double length = 16.0;
  std::size_t points = 32;
  double hbar = 0.5;
  std::size_t particles = 4;
  PotentialSpec potential = PotentialSpec::gaussian(1.0, 1.0);
  InitialStateConfig initial;
  double t_final = 1.0;
  std::vector<double> dts{0.25, 0.125, 0.0625, 0.03125};
  SubstepConfig substeps;
  EnsembleConfig ensemble;
  DictionaryConfig dictionary;
  double gamma_d = 1.0;
  HbarSweepConfig hbar_sweep;
  CostConfig cost;
  std::string output_dir = "rbq-out";
  /// 0: hardware concurrency; RBQ_THREADS caps either way.
  std::size_t threads = 0;
  std::size_t amplitude_cap = kDefaultAmplitudeCap;

  GridSpec grid() const { return make_grid(length, points, hbar); }
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::ordered_json to_json(const RunConfig& cfg);
/// Missing keys take defaults; unknown keys and ill-typed values throw ConfigError.
RunConfig config_from_json(const nlohmann::ordered_json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Applies "a.b.c=value" to a config document. The value is parsed as JSON
/// when possible and taken as a string otherwise.
void apply_override(nlohmann::ordered_json& doc, std::string_view assignment);

/// Throws ConfigError naming the first invalid field.
void validate(const RunConfig& cfg);

/// Worker count: cfg.threads (0 = hardware), capped by RBQ_THREADS, at least 1.
std::size_t worker_count(const RunConfig& cfg);

/// Orbitals of the product state (or one mixture component) for N particles.
std::vector<std::vector<cplx>> build_orbitals(const OrbitalSet& set, const GridSpec& g, std::size_t particles);

struct WeightedState {
  double weight = 1.0;
  WaveFunctionN psi;
};
/// Pure components of the initial state with convex weights summing to 1.
std::vector<WeightedState> build_initial_state(const RunConfig& cfg, const GridSpec& g);

}  // namespace rbq
