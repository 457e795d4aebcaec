#include "rbq/propagator.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rbq/simd/kernels.hpp"
#include "tensor_ops.hpp"

namespace rbq {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// Plans are created once per (N, M) with FFTW_ESTIMATE so that the chosen
// algorithm, and therefore every bit of the result, is the same in every run.
const FftPlans& plans_for(std::size_t particles, std::size_t m) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::size_t>, FftPlans> cache;
  std::lock_guard lock(mu);
  auto key = std::make_pair(particles, m);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<int> dims(particles, static_cast<int>(m));
  AlignedCVector scratch(detail::ipow(m, particles));
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  FftPlans p;
  p.forward = fftw_plan_dft(static_cast<int>(particles), dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  p.backward = fftw_plan_dft(static_cast<int>(particles), dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (p.forward == nullptr || p.backward == nullptr) throw std::runtime_error("fftw: plan creation failed");
  return cache.emplace(key, p).first->second;
}

void execute(fftw_plan plan, WaveFunctionN& psi) {
  auto* buf = reinterpret_cast<fftw_complex*>(psi.data());
  fftw_execute_dft(plan, buf, buf);
}

cplx unit_phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Outer product over axes of per-axis factors, particle 0 slowest.
void outer_product(AlignedCVector& out, std::size_t particles, std::span<const cplx> axis_factor, cplx scale) {
  const std::size_t m = axis_factor.size();
  out.assign(detail::ipow(m, particles), cplx{});
  out[0] = scale;
  std::size_t filled = 1;
  for (std::size_t axis = 0; axis < particles; ++axis) {
    for (std::size_t i = filled; i-- > 0;) {
      const cplx base = out[i];
      for (std::size_t q = 0; q < m; ++q) out[i * m + q] = base * axis_factor[q];
    }
    filled *= m;
  }
}

void kinetic_phase(AlignedCVector& out, const GridSpec& g, std::size_t particles, double h) {
  const std::size_t m = g.points();
  std::vector<cplx> axis(m);
  for (std::size_t q = 0; q < m; ++q) {
    const double xi = g.xi_of_bin(q);
    axis[q] = unit_phase(-h * xi * xi / (2.0 * g.hbar()));
  }
  const double norm = 1.0 / static_cast<double>(detail::ipow(m, particles));
  outer_product(out, particles, axis, cplx(norm, 0.0));
}

// prod over pairs of exp(-i angle_scale * coupling * V(x_l - x_n)).
std::size_t pair_phase(AlignedCVector& out, const GridSpec& g, std::size_t particles, const PotentialSpec& spec,
                       const InteractionMode& mode, double angle_scale) {
  const std::size_t m = g.points();
  out.assign(detail::ipow(m, particles), cplx(1.0, 0.0));
  const std::vector<double> table = pair_table(spec, g);
  std::vector<cplx> rows(m * m);
  for (std::size_t il = 0; il < m; ++il)
    for (std::size_t in = 0; in < m; ++in)
      rows[il * m + in] = unit_phase(-angle_scale * mode.coupling * table[(il + m - in) % m]);
  const auto& k = simd::kernels();
  for (const auto& [l, n] : mode.pairs) {
    detail::visit_pair_runs(particles, m, l, n, [&](std::size_t base, std::size_t il, std::size_t inner) {
      cplx* dst = out.data() + base;
      const cplx* row = rows.data() + il * m;
      if (inner == 1) {
        k.cmul(dst, row, m);
      } else {
        for (std::size_t in = 0; in < m; ++in) k.cmul_scalar(dst + in * inner, row[in], inner);
      }
    });
  }
  return mode.pairs.size();
}

void check_state(const WaveFunctionN& psi, const GridSpec& g, std::size_t particles) {
  if (psi.particles() != particles || !(psi.grid() == g)) {
    throw std::invalid_argument("propagator: state shape does not match the stepper");
  }
}

}  // namespace

struct SplitStepper::Impl {
  GridSpec grid;
  std::size_t particles;
  const FftPlans* plans;
  std::vector<std::pair<double, AlignedCVector>> kinetic;  // keyed by step length
  std::vector<std::pair<double, AlignedCVector>> potential;

  const AlignedCVector& kinetic_for(double tau) {
    for (const auto& [key, phase] : kinetic)
      if (key == tau) return phase;
    if (kinetic.size() >= 4) kinetic.erase(kinetic.begin());
    kinetic.emplace_back(tau, AlignedCVector{});
    kinetic_phase(kinetic.back().second, grid, particles, tau);
    return kinetic.back().second;
  }
};

SplitStepper::SplitStepper(const GridSpec& g, std::size_t particles) : impl_(std::make_unique<Impl>()) {
  impl_->grid = g;
  impl_->particles = particles;
  impl_->plans = &plans_for(particles, g.points());
}

SplitStepper::~SplitStepper() = default;
SplitStepper::SplitStepper(SplitStepper&&) noexcept = default;
SplitStepper& SplitStepper::operator=(SplitStepper&&) noexcept = default;

const SplitCoefficients& SplitCoefficients::of(SplitScheme scheme) {
  static const SplitCoefficients strang{{0.5, 0.5}, {1.0}};
  static const SplitCoefficients suzuki = [] {
    const double p = 1.0 / (4.0 - std::cbrt(4.0));
    const double q = 1.0 - 4.0 * p;
    return SplitCoefficients{{p / 2, p, (p + q) / 2, (p + q) / 2, p, p / 2}, {p, p, q, p, p}};
  }();
  return scheme == SplitScheme::strang ? strang : suzuki;
}

std::size_t SplitStepper::advance(WaveFunctionN& psi, const PotentialSpec& spec, const InteractionMode& mode,
                                  double h, std::size_t substeps, double* build_seconds, SplitScheme scheme) {
  Impl& s = *impl_;
  check_state(psi, s.grid, s.particles);
  if (substeps == 0) return 0;
  const SplitCoefficients& c = SplitCoefficients::of(scheme);
  const std::size_t stages = c.kinetic.size();

  // Potential weights in application order; the closing weight of one substep
  // and the opening weight of the next are merged.
  const double seam = c.potential.back() + c.potential.front();
  auto weight_at = [&](std::size_t substep, std::size_t stage) {
    if (stage == 0) return substep == 0 ? c.potential.front() : seam;
    return c.potential[stage];
  };

  const auto t0 = Clock::now();
  s.potential.clear();
  std::size_t built = 0;
  auto potential_for = [&](double w) -> const AlignedCVector& {
    for (const auto& [key, phase] : s.potential)
      if (key == w) return phase;
    s.potential.emplace_back(w, AlignedCVector{});
    built += pair_phase(s.potential.back().second, s.grid, s.particles, spec, mode, w * h / s.grid.hbar());
    return s.potential.back().second;
  };
  for (std::size_t st = 0; st < stages; ++st) potential_for(weight_at(0, st));
  if (substeps > 1) potential_for(seam);
  potential_for(c.potential.back());
  if (build_seconds != nullptr) *build_seconds += seconds_since(t0);

  const auto& k = simd::kernels();
  const std::size_t n = psi.size();
  for (std::size_t i = 0; i < substeps; ++i) {
    for (std::size_t st = 0; st < stages; ++st) {
      k.cmul(psi.data(), potential_for(weight_at(i, st)).data(), n);
      execute(s.plans->forward, psi);
      k.cmul(psi.data(), s.kinetic_for(c.kinetic[st] * h).data(), n);
      execute(s.plans->backward, psi);
    }
  }
  k.cmul(psi.data(), potential_for(c.potential.back()).data(), n);
  // One table per pair per rebuild, however many weights the scheme needs.
  return built / s.potential.size();
}

void SplitStepper::free_evolve(WaveFunctionN& psi, double t) {
  Impl& s = *impl_;
  check_state(psi, s.grid, s.particles);
  AlignedCVector kin;
  kinetic_phase(kin, s.grid, s.particles, t);
  execute(s.plans->forward, psi);
  simd::kernels().cmul(psi.data(), kin.data(), psi.size());
  execute(s.plans->backward, psi);
}

void strang_step(WaveFunctionN& psi, std::span<const double> diagonal, double dtau) {
  if (diagonal.size() != psi.size()) throw std::invalid_argument("strang_step: diagonal shape mismatch");
  const GridSpec& g = psi.grid();
  const FftPlans& plans = plans_for(psi.particles(), g.points());
  AlignedCVector half(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) half[i] = unit_phase(-dtau * diagonal[i] / (2.0 * g.hbar()));
  AlignedCVector kin;
  kinetic_phase(kin, g, psi.particles(), dtau);
  const auto& k = simd::kernels();
  k.cmul(psi.data(), half.data(), psi.size());
  execute(plans.forward, psi);
  k.cmul(psi.data(), kin.data(), psi.size());
  execute(plans.backward, psi);
  k.cmul(psi.data(), half.data(), psi.size());
}

std::size_t full_substeps(double t, std::size_t per_unit) {
  if (!(t >= 0.0)) throw std::invalid_argument("evolve: t must be nonnegative");
  if (t == 0.0) return 0;
  const double raw = t * static_cast<double>(per_unit);
  const double nearest = std::round(raw);
  const double n = std::abs(raw - nearest) <= 1e-9 * std::max(1.0, nearest) ? nearest : std::ceil(raw);
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

std::size_t RbSubsteps::for_interval(double dt) const {
  if (per_unit == 0) return std::max<std::size_t>(1, per_step);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(dt * static_cast<double>(per_unit))));
}

FullEvolveResult evolve_full(const WaveFunctionN& psi0, double t, std::size_t substeps_per_unit,
                             const PotentialSpec& spec, SplitScheme scheme) {
  const auto t0 = Clock::now();
  FullEvolveResult r{psi0, {}};
  const std::size_t n = full_substeps(t, substeps_per_unit);
  if (n > 0) {
    SplitStepper stepper(psi0.grid(), psi0.particles());
    const InteractionMode mode = InteractionMode::full(psi0.particles());
    r.report.pair_builds = stepper.advance(r.psi, spec, mode, t / static_cast<double>(n), n,
                                           &r.report.interaction_build_seconds, scheme);
    r.report.steps = 1;
    r.report.substeps_per_step = n;
    r.report.total_substeps = n;
    r.report.pair_evaluations = n * mode.pairs.size();
  }
  r.report.wall_seconds = seconds_since(t0);
  return r;
}

FullEvolveResult evolve_rb(const WaveFunctionN& psi0, double t, const BatchSchedule& schedule,
                           RbSubsteps substeps, const PotentialSpec& spec, SplitScheme scheme) {
  if (!(t >= 0.0)) throw std::invalid_argument("evolve_rb: t must be nonnegative");
  if (schedule.particles() != psi0.particles()) throw std::invalid_argument("evolve_rb: schedule N mismatch");
  const auto t0 = Clock::now();
  FullEvolveResult r{psi0, {}};
  const double dt = schedule.dt();
  const std::size_t whole = schedule.step_index(t);
  double rem = t - static_cast<double>(whole) * dt;
  if (rem <= 1e-12 * dt) rem = 0.0;
  const std::size_t per = substeps.for_interval(dt);
  const double h = dt / static_cast<double>(per);

  SplitStepper stepper(psi0.grid(), psi0.particles());
  auto run = [&](std::size_t step, double hh, std::size_t count) {
    const InteractionMode mode = InteractionMode::partition(schedule.partition(step));
    r.report.pair_builds += stepper.advance(r.psi, spec, mode, hh, count, &r.report.interaction_build_seconds, scheme);
    r.report.total_substeps += count;
    r.report.pair_evaluations += count * mode.pairs.size();
    ++r.report.steps;
  };
  for (std::size_t j = 0; j < whole; ++j) run(j, h, per);
  if (rem > 0.0) {
    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(rem / dt * static_cast<double>(per) - 1e-9)));
    run(whole, rem / static_cast<double>(count), count);
  }
  r.report.substeps_per_step = per;
  r.report.wall_seconds = seconds_since(t0);
  return r;
}

namespace {

CMatrix kinetic_matrix_1d(const GridSpec& g) {
  const std::size_t m = g.points();
  CMatrix out(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      cplx s = 0.0;
      for (std::size_t q = 0; q < m; ++q) {
        const double xi = g.xi_of_bin(q);
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(q * ((i + m - j) % m) % m) /
                           static_cast<double>(m);
        s += 0.5 * xi * xi * unit_phase(ang);
      }
      out(i, j) = s / static_cast<double>(m);
    }
  }
  return out;
}

}  // namespace

WaveFunctionN exact_evolve_oracle(const WaveFunctionN& psi0, double t, const PotentialSpec& spec,
                                  const InteractionMode& mode) {
  const GridSpec& g = psi0.grid();
  const std::size_t m = g.points();
  const std::size_t particles = psi0.particles();
  const std::size_t dim = psi0.size();
  if (dim > 4096) throw std::length_error("exact_evolve_oracle: M^N must be <= 4096");
  if (t == 0.0) return psi0;

  const CMatrix k1 = kinetic_matrix_1d(g);
  const InteractionDiagonal diag = interaction_diagonal(spec, g, particles, mode);
  CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t a = 0; a < particles; ++a) {
    const std::size_t stride = detail::ipow(m, particles - 1 - a);
    for (std::size_t row = 0; row < dim; ++row) {
      const std::size_t ia = (row / stride) % m;
      const std::size_t base = row - ia * stride;
      for (std::size_t ja = 0; ja < m; ++ja) {
        h(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(base + ja * stride)) += k1(ia, ja);
      }
    }
  }
  for (std::size_t i = 0; i < dim; ++i) h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += diag.values[i];
  h = 0.5 * (h + h.adjoint()).eval();

  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  Eigen::Map<const Eigen::VectorXcd> in(psi0.data(), static_cast<Eigen::Index>(dim));
  Eigen::VectorXcd coeff = es.eigenvectors().adjoint() * in;
  for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff(i) *= unit_phase(-t * es.eigenvalues()(i) / g.hbar());
  Eigen::VectorXcd out_vec = es.eigenvectors() * coeff;
  WaveFunctionN out(g, particles);
  for (std::size_t i = 0; i < dim; ++i) out.data()[i] = out_vec(static_cast<Eigen::Index>(i));
  return out;
}

double energy(const WaveFunctionN& psi, const PotentialSpec& spec, const InteractionMode& mode) {
  const GridSpec& g = psi.grid();
  const std::size_t m = g.points();
  const std::size_t particles = psi.particles();
  const double weight = std::pow(g.dx(), static_cast<double>(particles));

  const InteractionDiagonal diag = interaction_diagonal(spec, g, particles, mode);
  double potential = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) potential += std::norm(psi.data()[i]) * diag.values[i];

  WaveFunctionN hat = psi;
  execute(plans_for(particles, m).forward, hat);
  double kinetic = 0.0;
  std::vector<std::size_t> idx(particles, 0);
  for (std::size_t flat = 0; flat < hat.size(); ++flat) {
    double ksum = 0.0;
    for (std::size_t a = 0; a < particles; ++a) {
      const double xi = g.xi_of_bin(idx[a]);
      ksum += 0.5 * xi * xi;
    }
    kinetic += std::norm(hat.data()[flat]) * ksum;
    for (std::size_t a = particles; a-- > 0;) {
      if (++idx[a] < m) break;
      idx[a] = 0;
    }
  }
  kinetic /= static_cast<double>(hat.size());
  return weight * (kinetic + potential);
}

}  // namespace rbq
