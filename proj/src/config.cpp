#include "rbq/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace rbq {

using nlohmann::ordered_json;

SplitScheme SubstepConfig::split_scheme() const {
  if (scheme == "strang") return SplitScheme::strang;
  if (scheme == "suzuki4") return SplitScheme::suzuki4;
  throw ConfigError("substeps.scheme: expected \"strang\" or \"suzuki4\", got \"" + scheme + "\"");
}

namespace {

ordered_json orbitals_json(const OrbitalSet& o) {
  return {{"centers", o.centers}, {"widths", o.widths}, {"momenta", o.momenta}};
}

ordered_json potential_json(const PotentialSpec& p) {
  static constexpr const char* kinds[] = {"zero", "gaussian", "cosine", "tabulated"};
  return {{"kind", kinds[static_cast<int>(p.kind)]},
          {"amplitude", p.amplitude},
          {"width", p.width},
          {"wavenumber", p.wavenumber},
          {"samples", p.samples},
          {"spacing", p.spacing}};
}

bool same_category(const ordered_json& a, const ordered_json& b) {
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

// Overlays `patch` on `base`, rejecting keys that `base` does not have.
void merge_strict(ordered_json& base, const ordered_json& patch, const std::string& path) {
  if (!patch.is_object()) throw ConfigError(path.empty() ? "config: expected an object" : path + ": expected an object");
  for (const auto& [key, value] : patch.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) throw ConfigError(where + ": unknown key");
    ordered_json& slot = base[key];
    if (slot.is_object()) {
      merge_strict(slot, value, where);
    } else {
      if (!same_category(slot, value)) throw ConfigError(where + ": expected " + std::string(slot.type_name()));
      slot = value;
    }
  }
}

double get_real(const ordered_json& j, const char* key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(path + key + ": expected a number");
  return v.get<double>();
}

std::size_t get_count(const ordered_json& j, const char* key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(path + key + ": expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> get_reals(const ordered_json& j, const char* key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_array()) throw ConfigError(path + key + ": expected an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(path + key + ": expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::size_t> get_counts(const ordered_json& j, const char* key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_array()) throw ConfigError(path + key + ": expected an array");
  std::vector<std::size_t> out;
  for (const auto& e : v) {
    if (!e.is_number_integer() || e.get<long long>() < 0) {
      throw ConfigError(path + key + ": expected nonnegative integers");
    }
    out.push_back(e.get<std::size_t>());
  }
  return out;
}

std::string get_string(const ordered_json& j, const char* key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw ConfigError(path + key + ": expected a string");
  return v.get<std::string>();
}

bool get_bool(const ordered_json& j, const char* key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(path + key + ": expected a boolean");
  return v.get<bool>();
}

OrbitalSet parse_orbitals(const ordered_json& j, const std::string& path) {
  return {get_reals(j, "centers", path), get_reals(j, "widths", path), get_reals(j, "momenta", path)};
}

PotentialSpec parse_potential(const ordered_json& j) {
  const std::string kind = get_string(j, "kind", "potential.");
  const double amplitude = get_real(j, "amplitude", "potential.");
  try {
    if (kind == "zero") return PotentialSpec::zero();
    if (kind == "gaussian") return PotentialSpec::gaussian(amplitude, get_real(j, "width", "potential."));
    if (kind == "cosine") return PotentialSpec::cosine(amplitude, get_real(j, "wavenumber", "potential."));
    if (kind == "tabulated") {
      return PotentialSpec::tabulated(get_reals(j, "samples", "potential."), get_real(j, "spacing", "potential."));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }
  throw ConfigError("potential.kind: unknown kind \"" + kind + "\"");
}

}  // namespace

ordered_json to_json(const RunConfig& c) {
  ordered_json mixture = ordered_json::array();
  for (const auto& m : c.initial.mixture) {
    ordered_json e = orbitals_json(m.orbitals);
    e["weight"] = m.weight;
    mixture.push_back(e);
  }
  ordered_json initial = {{"kind", c.initial.kind}};
  const ordered_json orbitals = orbitals_json(c.initial.orbitals);
  for (const auto& [k, v] : orbitals.items()) initial[k] = v;
  initial["symmetrize"] = c.initial.symmetrize;
  initial["path"] = c.initial.path;
  initial["mixture"] = mixture;

  return {
      {"grid", {{"length", c.length}, {"points", c.points}, {"hbar", c.hbar}}},
      {"particles", c.particles},
      {"potential", potential_json(c.potential)},
      {"initial_state", initial},
      {"t_final", c.t_final},
      {"dt", c.dts},
      {"substeps",
       {{"scheme", c.substeps.scheme},
        {"full_per_unit", c.substeps.full_per_unit},
        {"rb_per_step", c.substeps.rb_per_step},
        {"rb_per_unit", c.substeps.rb_per_unit},
        {"refine_check", c.substeps.refine_check},
        {"refine_tol", c.substeps.refine_tol}}},
      {"ensemble",
       {{"realizations", c.ensemble.realizations}, {"sampling", c.ensemble.sampling}, {"seed", c.ensemble.seed}}},
      {"dictionary",
       {{"order", c.dictionary.order},
        {"plane_waves_per_axis", c.dictionary.plane_waves_per_axis},
        {"gaussians_x", c.dictionary.gaussians_x},
        {"gaussians_xi", c.dictionary.gaussians_xi}}},
      {"gamma_d", c.gamma_d},
      {"hbar_sweep",
       {{"hbars", c.hbar_sweep.hbars},
        {"points", c.hbar_sweep.points},
        {"dt", c.hbar_sweep.dt},
        {"self_test_tol", c.hbar_sweep.self_test_tol}}},
      {"cost",
       {{"particles", c.cost.particles},
        {"points", c.cost.points},
        {"steps", c.cost.steps},
        {"shuffle_max", c.cost.shuffle_max},
        {"shuffle_work", c.cost.shuffle_work},
        {"shuffle_trials", c.cost.shuffle_trials}}},
      {"output_dir", c.output_dir},
      {"threads", c.threads},
      {"amplitude_cap", c.amplitude_cap},
  };
}

RunConfig config_from_json(const ordered_json& user) {
  ordered_json j = to_json(RunConfig{});
  merge_strict(j, user, "");

  RunConfig c;
  const auto& grid = j["grid"];
  c.length = get_real(grid, "length", "grid.");
  c.points = get_count(grid, "points", "grid.");
  c.hbar = get_real(grid, "hbar", "grid.");
  c.particles = get_count(j, "particles", "");
  c.potential = parse_potential(j["potential"]);

  const auto& init = j["initial_state"];
  c.initial.kind = get_string(init, "kind", "initial_state.");
  c.initial.orbitals = parse_orbitals(init, "initial_state.");
  c.initial.symmetrize = get_bool(init, "symmetrize", "initial_state.");
  c.initial.path = get_string(init, "path", "initial_state.");
  std::size_t idx = 0;
  for (const auto& m : init["mixture"]) {
    const std::string where = "initial_state.mixture[" + std::to_string(idx++) + "].";
    ordered_json base = orbitals_json({});
    base["weight"] = 1.0;
    merge_strict(base, m, where.substr(0, where.size() - 1));
    c.initial.mixture.push_back({get_real(base, "weight", where), parse_orbitals(base, where)});
  }

  c.t_final = get_real(j, "t_final", "");
  c.dts = get_reals(j, "dt", "");
  const auto& sub = j["substeps"];
  c.substeps.scheme = get_string(sub, "scheme", "substeps.");
  c.substeps.full_per_unit = get_count(sub, "full_per_unit", "substeps.");
  c.substeps.rb_per_step = get_count(sub, "rb_per_step", "substeps.");
  c.substeps.rb_per_unit = get_count(sub, "rb_per_unit", "substeps.");
  c.substeps.refine_check = get_bool(sub, "refine_check", "substeps.");
  c.substeps.refine_tol = get_real(sub, "refine_tol", "substeps.");
  const auto& ens = j["ensemble"];
  c.ensemble.realizations = get_count(ens, "realizations", "ensemble.");
  c.ensemble.sampling = get_string(ens, "sampling", "ensemble.");
  if (!ens["seed"].is_number_unsigned()) throw ConfigError("ensemble.seed: expected a nonnegative integer");
  c.ensemble.seed = ens["seed"].get<std::uint64_t>();
  const auto& dict = j["dictionary"];
  c.dictionary.order = get_count(dict, "order", "dictionary.");
  c.dictionary.plane_waves_per_axis = get_count(dict, "plane_waves_per_axis", "dictionary.");
  c.dictionary.gaussians_x = get_count(dict, "gaussians_x", "dictionary.");
  c.dictionary.gaussians_xi = get_count(dict, "gaussians_xi", "dictionary.");
  c.gamma_d = get_real(j, "gamma_d", "");
  const auto& hs = j["hbar_sweep"];
  c.hbar_sweep.hbars = get_reals(hs, "hbars", "hbar_sweep.");
  c.hbar_sweep.points = get_counts(hs, "points", "hbar_sweep.");
  c.hbar_sweep.dt = get_real(hs, "dt", "hbar_sweep.");
  c.hbar_sweep.self_test_tol = get_real(hs, "self_test_tol", "hbar_sweep.");
  const auto& cost = j["cost"];
  c.cost.particles = get_counts(cost, "particles", "cost.");
  c.cost.points = get_count(cost, "points", "cost.");
  c.cost.steps = get_count(cost, "steps", "cost.");
  c.cost.shuffle_max = get_count(cost, "shuffle_max", "cost.");
  c.cost.shuffle_work = get_count(cost, "shuffle_work", "cost.");
  c.cost.shuffle_trials = get_count(cost, "shuffle_trials", "cost.");
  c.output_dir = get_string(j, "output_dir", "");
  c.threads = get_count(j, "threads", "");
  c.amplitude_cap = get_count(j, "amplitude_cap", "");
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void apply_override(ordered_json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("--set expects key=value, got \"" + std::string(assignment) + "\"");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  ordered_json value = ordered_json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  ordered_json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("--set: malformed key \"" + key + "\"");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part)) (*node)[part] = ordered_json::object();
    node = &(*node)[part];
    if (!node->is_object()) throw ConfigError("--set: \"" + key + "\" descends into a non-object");
    start = dot + 1;
  }
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& field, const std::string& why) { throw ConfigError(field + ": " + why); };
  try {
    (void)make_grid(c.length, c.points, c.hbar);
  } catch (const std::invalid_argument& e) {
    fail("grid", e.what());
  }
  if (c.particles < 2 || c.particles % 2 != 0) fail("particles", "must be even and >= 2");
  try {
    (void)checked_tensor_size(c.particles, c.points, c.amplitude_cap);
  } catch (const std::length_error& e) {
    fail("amplitude_cap", e.what());
  }
  if (c.initial.kind != "product" && c.initial.kind != "file") fail("initial_state.kind", "expected product or file");
  if (c.initial.kind == "file" && c.initial.path.empty()) fail("initial_state.path", "required for kind file");
  auto check_orbitals = [&](const OrbitalSet& o, const std::string& where) {
    for (const auto* v : {&o.centers, &o.widths, &o.momenta}) {
      if (!v->empty() && v->size() != c.particles) fail(where, "per-particle lists must have N entries");
    }
    for (double w : o.widths)
      if (!(w > 0)) fail(where + ".widths", "must be positive");
  };
  check_orbitals(c.initial.orbitals, "initial_state");
  double total = 0.0;
  for (std::size_t i = 0; i < c.initial.mixture.size(); ++i) {
    const auto& m = c.initial.mixture[i];
    if (!(m.weight > 0)) fail("initial_state.mixture[" + std::to_string(i) + "].weight", "must be positive");
    check_orbitals(m.orbitals, "initial_state.mixture[" + std::to_string(i) + "]");
    total += m.weight;
  }
  if (!c.initial.mixture.empty() && std::abs(total - 1.0) > 1e-12) fail("initial_state.mixture", "weights must sum to 1");
  if (!(c.t_final >= 0)) fail("t_final", "must be nonnegative");
  if (c.dts.empty()) fail("dt", "at least one value required");
  for (double dt : c.dts)
    if (!(dt > 0)) fail("dt", "values must be positive");
  (void)c.substeps.split_scheme();
  if (c.substeps.full_per_unit == 0) fail("substeps.full_per_unit", "must be >= 1");
  if (c.substeps.rb_per_step == 0 && c.substeps.rb_per_unit == 0) fail("substeps", "RB substep policy is empty");
  if (!(c.substeps.refine_tol > 0)) fail("substeps.refine_tol", "must be positive");
  if (c.ensemble.realizations == 0) fail("ensemble.realizations", "must be >= 1");
  if (c.ensemble.sampling != "round_robin" && c.ensemble.sampling != "independent") {
    fail("ensemble.sampling", "expected round_robin or independent");
  }
  if (c.dictionary.order == 0) fail("dictionary.order", "must be >= 1");
  if (c.dictionary.order > 3 && c.dictionary.gaussians_x * c.dictionary.gaussians_xi > 0) {
    fail("dictionary.order", "gaussian bumps are tabulated up to order 3");
  }
  if (!(c.gamma_d > 0)) fail("gamma_d", "must be positive");
  if (c.hbar_sweep.hbars.size() != c.hbar_sweep.points.size()) fail("hbar_sweep", "hbars and points differ in length");
  for (double h : c.hbar_sweep.hbars)
    if (!(h > 0)) fail("hbar_sweep.hbars", "must be positive");
  if (!(c.hbar_sweep.dt > 0)) fail("hbar_sweep.dt", "must be positive");
  for (std::size_t n : c.cost.particles)
    if (n < 2 || n % 2 != 0) fail("cost.particles", "entries must be even and >= 2");
  if (c.cost.shuffle_max < 2) fail("cost.shuffle_max", "must be >= 2");
  if (c.cost.shuffle_trials == 0) fail("cost.shuffle_trials", "must be >= 1");
}

std::size_t worker_count(const RunConfig& cfg) {
  std::size_t n = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RBQ_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<std::size_t>(n, cap);
  }
  return std::max<std::size_t>(1, n);
}

std::vector<std::vector<cplx>> build_orbitals(const OrbitalSet& set, const GridSpec& g, std::size_t particles) {
  std::vector<std::vector<cplx>> out;
  for (std::size_t m = 0; m < particles; ++m) {
    const double c = set.centers.empty() ? 1.5 * static_cast<double>(m) - 0.75 * static_cast<double>(particles - 1)
                                         : set.centers.at(m);
    const double w = set.widths.empty() ? 1.0 : set.widths.at(m);
    const double p = set.momenta.empty() ? 0.0 : set.momenta.at(m);
    out.push_back(gaussian_orbital(g, c, w, p));
  }
  return out;
}

std::vector<WeightedState> build_initial_state(const RunConfig& cfg, const GridSpec& g) {
  auto finish = [&](WaveFunctionN psi) { return cfg.initial.symmetrize ? psi.symmetrized() : psi; };
  if (cfg.initial.kind == "file") {
    WaveFunctionN psi = load_state(cfg.initial.path, cfg.amplitude_cap);
    if (!(psi.grid() == g) || psi.particles() != cfg.particles) {
      throw ConfigError("initial_state.path: state grid or N does not match the config");
    }
    return {{1.0, finish(std::move(psi))}};
  }
  std::vector<WeightedState> out;
  if (cfg.initial.mixture.empty()) {
    out.push_back(
        {1.0, finish(WaveFunctionN::product(g, build_orbitals(cfg.initial.orbitals, g, cfg.particles), cfg.amplitude_cap))});
  } else {
    for (const auto& m : cfg.initial.mixture) {
      out.push_back({m.weight, finish(WaveFunctionN::product(g, build_orbitals(m.orbitals, g, cfg.particles),
                                                             cfg.amplitude_cap))});
    }
  }
  return out;
}

}  // namespace rbq
