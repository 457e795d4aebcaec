#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "rbq/bounds.hpp"
#include "rbq/harness.hpp"
#include "rbq/simd/kernels.hpp"
#include "rbq/wigner.hpp"

namespace rbq {
namespace {

using Clock = std::chrono::steady_clock;

struct Suite {
  Report report;
  void add(std::string name, bool ok, double value, double limit, std::string detail = {}) {
    report.checks.push_back({std::move(name), ok, value, limit, std::move(detail)});
  }
  void at_most(std::string name, double value, double limit, std::string detail = {}) {
    add(std::move(name), value <= limit, value, limit, std::move(detail));
  }
};

CMatrix random_density(std::mt19937_64& rng, std::size_t m, double dx) {
  std::normal_distribution<double> n01;
  CMatrix b(m, m);
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = cplx(n01(rng), n01(rng));
  CMatrix rho = b * b.adjoint();
  rho /= rho.trace().real() * dx;
  return rho;
}

WaveFunctionN random_state(std::mt19937_64& rng, const GridSpec& g, std::size_t particles) {
  std::normal_distribution<double> n01;
  WaveFunctionN psi(g, particles);
  for (auto& a : psi.amplitudes()) a = cplx(n01(rng), n01(rng));
  psi.normalize();
  return psi;
}

// Partial trace by explicit index arithmetic, independent of the library's contraction.
CMatrix brute_force_reduce(const WaveFunctionN& psi, std::size_t label) {
  const std::size_t m = psi.grid().points();
  const std::size_t n = psi.particles();
  std::size_t stride = 1;
  for (std::size_t a = label + 1; a < n; ++a) stride *= m;
  CMatrix out = CMatrix::Zero(m, m);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const std::size_t xi = (i / stride) % m;
    const std::size_t rest = i - xi * stride;
    for (std::size_t y = 0; y < m; ++y) out(xi, y) += psi.data()[i] * std::conj(psi.data()[rest + y * stride]);
  }
  return out * std::pow(psi.grid().dx(), static_cast<double>(n - 1));
}

void grid_items(Suite& s, std::mt19937_64& rng) {
  const GridSpec g = make_grid(8.0, 16, 0.5);
  std::normal_distribution<double> n01;
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix1 rho{random_density(rng, g.points(), g.dx()), g};
    CPhaseGrid a(g.points(), g.points());
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = n01(rng);
    const cplx lhs = (rho.matrix() * weyl_quantize(a, g).matrix()).trace();
    const WignerGrid w = wigner(rho, g);
    const cplx rhs = g.dx() * g.dxi() * (w.values.cast<cplx>().cwiseProduct(a.conjugate())).sum();
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  s.at_most("grid.weyl_wigner_adjointness", worst, 1e-8, "relative, 5 random (rho, a)");
}

void potential_items(Suite& s, const RunConfig& cfg) {
  const GridSpec g = make_grid(8.0, 8, 0.5);
  const auto v = PotentialSpec::gaussian(1.0, 1.0);
  const auto full = interaction_diagonal(v, g, 4, InteractionMode::full(4));
  std::vector<double> avg(full.values.size(), 0.0);
  std::vector<std::size_t> sigma(4);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  std::size_t count = 0;
  do {
    const auto d = interaction_diagonal(v, g, 4, InteractionMode::partition(PairPartition::from_permutation(sigma)));
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += d.values[i];
    ++count;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  double worst = 0.0;
  for (std::size_t i = 0; i < avg.size(); ++i) {
    worst = std::max(worst, std::abs(avg[i] / static_cast<double>(count) - full.values[i]));
  }
  s.at_most("potential.expectation_identity", worst, 1e-12, "N=4 partition average vs full diagonal");

  try {
    const PotentialConstants c = potential_constants(cfg.potential);
    s.add("potential.config_constants", std::isfinite(c.lambda) && std::isfinite(c.lconst), c.lambda, 0.0,
          cfg.potential.describe());
  } catch (const std::exception& e) {
    s.add("potential.config_constants", false, 0.0, 0.0, e.what());
  }
  if (!cfg.potential.decays()) {
    s.report.warnings.push_back("hypothesis-violating potential: " + cfg.potential.describe() + " does not decay");
  }
}

void batching_items(Suite& s) {
  const PairFrequency ex = pair_frequency_exhaustive(4);
  bool exact = true;
  for (std::size_t l = 0; l < 4; ++l)
    for (std::size_t n = l + 1; n < 4; ++n) exact = exact && 3 * ex.numerator[l * 4 + n] == ex.denominator;
  s.add("batching.exhaustive_frequency_n4", exact, ex.at(0, 1), 1.0 / 3.0, "every pair exactly 1/3");

  const PairFrequency mc = pair_frequency_montecarlo(10, 100000, 7);
  double worst_z = 0.0;
  for (std::size_t l = 0; l < 10; ++l)
    for (std::size_t n = l + 1; n < 10; ++n) worst_z = std::max(worst_z, std::abs(mc.at(l, n) - 1.0 / 9.0) / mc.se(l, n));
  s.at_most("batching.montecarlo_frequency_n10", worst_z, 3.0, "largest |f - 1/9| / SE over 45 pairs, 1e5 samples");
}

void propagator_items(Suite& s, const RunConfig& cfg) {
  const GridSpec g = make_grid(8.0, 16, 0.5);
  const auto v = PotentialSpec::gaussian(1.0, 1.0);
  const std::vector<std::vector<cplx>> orb{gaussian_orbital(g, -1.0, 0.7), gaussian_orbital(g, 1.0, 0.7)};
  const WaveFunctionN psi0 = WaveFunctionN::product(g, orb);
  const auto mode = InteractionMode::full(2);

  const auto run = evolve_full(psi0, 1.0, cfg.substeps.full_per_unit, v, cfg.substeps.split_scheme());
  s.at_most("propagator.unitarity", std::abs(run.psi.norm() - 1.0), 1e-12, "N=2, t=1");
  s.at_most("propagator.energy_drift", std::abs(energy(run.psi, v, mode) - energy(psi0, v, mode)), 1e-8,
            "N=2, t=1, configured substeps");

  const WaveFunctionN exact = exact_evolve_oracle(psi0, 1.0, v, mode);
  const auto fine = evolve_full(psi0, 1.0, 256, v, SplitScheme::suzuki4);
  s.at_most("propagator.oracle_cross_check", fine.psi.distance(exact), 1e-8, "N=2, M=16, 256 substeps");

  // One Strang step against the oracle at dtau and dtau/2: local error O(dtau^3).
  const auto one_step = [&](double tau) {
    WaveFunctionN p = psi0;
    SplitStepper(g, 2).advance(p, v, mode, tau, 1);
    return p.distance(exact_evolve_oracle(psi0, tau, v, mode));
  };
  const double ratio = one_step(0.2) / one_step(0.1);
  s.add("propagator.strang_local_order", ratio > 6.0 && ratio < 10.0, ratio, 8.0, "one-step error ratio on halving");

  const BatchSchedule sched(0.125, 11, 3, 2);
  const auto rb = evolve_rb(psi0, 1.0, sched, cfg.substeps.rb(), v, cfg.substeps.split_scheme());
  const std::size_t per = cfg.substeps.rb().for_interval(0.125);
  WaveFunctionN same = psi0;
  SplitStepper(g, 2).advance(same, v, mode, 0.125 / static_cast<double>(per), 8 * per, nullptr,
                             cfg.substeps.split_scheme());
  s.at_most("propagator.n2_rb_equals_full", rb.psi.distance(same), 1e-12, "same substeps, any seed");
}

void density_items(Suite& s, std::mt19937_64& rng) {
  const GridSpec g = make_grid(4.0, 8, 1.0);
  const WaveFunctionN psi = random_state(rng, g, 3);
  double worst = 0.0;
  for (std::size_t label = 0; label < 3; ++label) {
    worst = std::max(worst, (reduce_one(psi, label).kernel - brute_force_reduce(psi, label)).cwiseAbs().maxCoeff());
  }
  s.at_most("density.partial_trace_oracle", worst, 1e-12, "N=3, M=8 random state");

  const DensityMatrix1 a{random_density(rng, 8, g.dx()), g};
  const DensityMatrix1 b{random_density(rng, 8, g.dx()), g};
  const Eigen::JacobiSVD<CMatrix> svd((a.kernel - b.kernel) * g.dx());
  s.at_most("density.trace_distance_oracle", std::abs(trace_distance(a, b) - svd.singularValues().sum()), 1e-10,
            "against singular values");
  const DensityMatrix1 r = reduce_one_symmetrized(psi);
  s.at_most("density.invariants", std::max(r.hermiticity_defect(), std::abs(r.trace() - 1.0)), 1e-10,
            "Hermiticity and trace of a random reduction");
}

void wigner_items(Suite& s, std::mt19937_64& rng) {
  const double hbar = 0.5;
  const GridSpec g = make_grid(16.0, 64, hbar);
  const auto orbital = gaussian_orbital(g, 0.0, std::sqrt(hbar));
  const DensityMatrix1 rho = DensityMatrix1::pure(g, orbital);
  const WignerGrid w = wigner(rho, g);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.points(); ++j)
    for (std::size_t k = 0; k < g.points(); ++k) {
      const double x = g.x(j), xi = g.xi(k);
      const double exact = std::exp(-(x * x + xi * xi) / hbar) / (std::numbers::pi * hbar);
      worst = std::max(worst, std::abs(w.values(j, k) - exact));
    }
  s.at_most("wigner.coherent_gaussian", worst, 1e-6, "sup-norm, hbar=0.5, M=64");
  s.at_most("wigner.mass", std::abs(w.mass() - 1.0), 1e-8);
  s.at_most("wigner.purity", std::abs(w.purity() - (rho.matrix() * rho.matrix()).trace().real()), 1e-6);
  s.at_most("wigner.real", w.imag_residue, 1e-10, "discarded imaginary part");

  const GridSpec small = make_grid(8.0, 16, 0.5);
  const DensityMatrix1 mixed{random_density(rng, 16, small.dx()), small};
  s.at_most("wigner.mass_mixed", std::abs(wigner(mixed, small).mass() - 1.0), 1e-8, "random mixed state");
}

void lemma_items(Suite& s, std::mt19937_64& rng) {
  const GridSpec g = make_grid(16.0, 32, 0.5);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> mode(1, 6);
  std::size_t violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    CMatrix a(32, 32);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = cplx(n01(rng), n01(rng));
    const OperatorMatrix t = OperatorMatrix::from_matrix(0.5 * (a + a.adjoint()), g.dx(), true);
    std::vector<double> f(32);
    const int q = mode(rng);
    const double amp = n01(rng), ph = phase(rng);
    for (std::size_t j = 0; j < 32; ++j) f[j] = amp * std::cos(2.0 * std::numbers::pi * q * g.x(j) / g.length() + ph);
    const LemmaCheck c = commutator_lemma_check(f, t, g);
    if (!c.holds) ++violations;
    if (c.rhs > 0) worst = std::max(worst, c.lhs / c.rhs);
  }
  s.add("bounds.commutator_lemma", violations == 0, static_cast<double>(violations), 0.0,
        "1000 random Hermitian T, largest lhs/rhs " + sci(worst));
}

void simd_items(Suite& s, std::mt19937_64& rng) {
  const simd::KernelTable& ref = simd::scalar_kernels();
  const simd::KernelTable& act = simd::kernels();
  std::normal_distribution<double> n01;
  const std::size_t n = 1037;
  std::vector<cplx> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = cplx(n01(rng), n01(rng));
    b[i] = cplx(n01(rng), n01(rng));
  }
  auto x = a, y = a;
  ref.cmul(x.data(), b.data(), n);
  act.cmul(y.data(), b.data(), n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  worst = std::max(worst, std::abs(ref.dot_conj(a.data(), b.data(), n) - act.dot_conj(a.data(), b.data(), n)) / n);
  s.at_most("simd.kernel_equivalence", worst, 1e-13, std::string("active table: ") + std::string(act.name));
}

}  // namespace

Report verify_suite(const RunConfig& cfg) {
  validate(cfg);
  Suite s;
  std::mt19937_64 rng(cfg.ensemble.seed);
  grid_items(s, rng);
  potential_items(s, cfg);
  batching_items(s);
  propagator_items(s, cfg);
  density_items(s, rng);
  wigner_items(s, rng);
  lemma_items(s, rng);
  simd_items(s, rng);

  const GridSpec g = cfg.grid();
  const FreeEvolutionCheck fe = free_evolution_self_test(g, cfg.t_final, cfg.hbar_sweep.self_test_tol);
  s.add("harness.free_evolution", fe.passed, std::abs(fe.variance - fe.expected), cfg.hbar_sweep.self_test_tol,
        "configured grid");
  const auto states = build_initial_state(cfg, g);
  double boundary = 0.0;
  for (const auto& st : states) boundary = std::max(boundary, boundary_mass(reduce_one_symmetrized(st.psi)));
  if (boundary > kBoundaryMassLimit) {
    s.report.warnings.push_back("initial boundary mass " + sci(boundary) + " exceeds 1e-10; enlarge L");
  }
  s.report.extra["simd"] = std::string(simd::kernels().name);
  return s.report;
}

CostReport run_cost_bench(const RunConfig& cfg) {
  validate(cfg);
  CostReport out;
  const GridSpec g = make_grid(cfg.length, cfg.cost.points, cfg.hbar);
  const std::size_t steps = std::max<std::size_t>(1, cfg.cost.steps);
  const double dt = 1.0 / static_cast<double>(steps);
  for (std::size_t n : cfg.cost.particles) {
    const WaveFunctionN psi0 = WaveFunctionN::product(g, build_orbitals({}, g, n), cfg.amplitude_cap);
    const auto full = evolve_full(psi0, 1.0, steps, cfg.potential, SplitScheme::strang);
    const auto rb = evolve_rb(psi0, 1.0, BatchSchedule(dt, cfg.ensemble.seed, 0, n), RbSubsteps{1, 0}, cfg.potential,
                              SplitScheme::strang);
    CostRow row;
    row.particles = n;
    row.pair_evals_full = full.report.pair_evaluations;
    row.pair_evals_rb = rb.report.pair_evaluations;

    // Interaction-diagonal build time per step, best of a few repetitions.
    auto best_of = [&](const InteractionMode& mode) {
      double best = 1e300;
      for (int rep = 0; rep < 3; ++rep) {
        const auto t0 = Clock::now();
        (void)interaction_diagonal(cfg.potential, g, n, mode);
        best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
      }
      return best;
    };
    row.build_seconds_full = best_of(InteractionMode::full(n));
    row.build_seconds_rb = best_of(InteractionMode::partition(BatchSchedule(dt, cfg.ensemble.seed, 0, n).partition(0)));
    out.report.checks.push_back({"cost_law[N=" + std::to_string(n) + "]",
                                 row.pair_evals_rb * (n - 1) == row.pair_evals_full,
                                 static_cast<double>(row.pair_evals_rb) / static_cast<double>(row.pair_evals_full),
                                 1.0 / static_cast<double>(n - 1), "RB/full pair evaluations"});
    out.rows.push_back(row);
  }

  // Shuffle timing on preallocated labels; total work per trial is fixed so
  // every size is timed over a comparable interval.
  std::vector<double> sizes, seconds;
  std::vector<std::size_t> labels;
  std::uint64_t sink = 0;
  for (std::size_t n = 2; n <= cfg.cost.shuffle_max; n *= 2) {
    labels.resize(n);
    const std::size_t reps = std::max<std::size_t>(1, cfg.cost.shuffle_work / n);
    double best = 1e300;
    for (std::size_t trial = 0; trial < cfg.cost.shuffle_trials; ++trial) {
      std::iota(labels.begin(), labels.end(), std::size_t{0});
      const auto t0 = Clock::now();
      for (std::size_t r = 0; r < reps; ++r) {
        RngStream stream(cfg.ensemble.seed, r, static_cast<std::uint32_t>(trial));
        shuffle_into(stream, labels);
      }
      best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count() / static_cast<double>(reps));
      sink += labels[0];
    }
    out.shuffle.push_back({n, best});
    sizes.push_back(static_cast<double>(n));
    seconds.push_back(best);
  }
  out.shuffle_exponent = loglog_slope(sizes, seconds);
  out.report.checks.push_back({"shuffle_linear", out.shuffle_exponent >= 0.9 && out.shuffle_exponent <= 1.1,
                               out.shuffle_exponent, 1.0, "fitted exponent over N = 2 .. shuffle_max"});
  out.report.extra["shuffle_checksum"] = sink;
  return out;
}

}  // namespace rbq
