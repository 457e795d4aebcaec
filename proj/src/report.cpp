#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "rbq/harness.hpp"

namespace rbq {
namespace {

using nlohmann::ordered_json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json finite_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json checks_json(const std::vector<CheckItem>& checks) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"value", finite_or_null(c.value)},
                   {"limit", finite_or_null(c.limit)},
                   {"detail", c.detail}});
  }
  return arr;
}

}  // namespace

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> rows_csv_columns(bool timings) {
  std::vector<std::string> cols{"kind",           "particles",        "points",          "hbar",
                                "dt",             "realizations",     "trace_distance",  "trace_distance_se",
                                "dual_norm_lb",   "dual_norm_se",     "dhbar_lb",        "spread",
                                "integrator_offset", "theorem_rhs",   "naive_trace_rhs", "pair_evals_full",
                                "pair_evals_rb"};
  if (timings) {
    cols.emplace_back("wall_full_s");
    cols.emplace_back("wall_rb_s");
  }
  return cols;
}

void write_rows_csv(const std::vector<SweepRow>& rows, std::ostream& out, bool timings) {
  const auto cols = rows_csv_columns(timings);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << csv_field(cols[i]);
  out << "\r\n";
  for (const auto& r : rows) {
    std::vector<std::string> f{csv_field(r.kind),
                               std::to_string(r.particles),
                               std::to_string(r.points),
                               num(r.hbar),
                               num(r.dt),
                               std::to_string(r.realizations),
                               num(r.trace_distance),
                               num(r.trace_distance_se),
                               num(r.dual_norm),
                               num(r.dual_norm_se),
                               num(r.dhbar),
                               num(r.spread),
                               num(r.integrator_offset),
                               num(r.theorem_rhs),
                               num(r.naive_trace_rhs),
                               std::to_string(r.pair_evals_full),
                               std::to_string(r.pair_evals_rb)};
    if (timings) {
      f.push_back(num(r.wall_full));
      f.push_back(num(r.wall_rb));
    }
    for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << f[i];
    out << "\r\n";
  }
}

ordered_json summary_json(const SweepResult& r, const RunConfig& cfg, const std::string& command) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"dt", row.dt},
                    {"hbar", row.hbar},
                    {"points", row.points},
                    {"realizations", row.realizations},
                    {"trace_distance", row.trace_distance},
                    {"trace_distance_se", finite_or_null(row.trace_distance_se)},
                    {"dual_norm_lb", row.dual_norm},
                    {"dual_norm_se", finite_or_null(row.dual_norm_se)},
                    {"dhbar_lb", finite_or_null(row.dhbar)},
                    {"dual_over_dhbar", finite_or_null(row.dual_norm / row.dhbar)},
                    {"measured_over_theorem", row.dual_norm / row.theorem_rhs},
                    {"trace_over_naive", row.trace_distance / row.naive_trace_rhs},
                    {"wall_full_s", row.wall_full},
                    {"wall_rb_s", row.wall_rb}});
  }
  const auto& d = r.diagnostics;
  return {{"command", command},
          {"all_passed", r.all_passed()},
          {"slope_trace_distance", finite_or_null(r.slope)},
          {"slope_dual_norm", finite_or_null(r.slope_dual)},
          {"potential", {{"description", cfg.potential.describe()},
                         {"lambda", r.constants.lambda},
                         {"lconst", r.constants.lconst},
                         {"sup_norm", r.constants.sup_norm}}},
          {"diagnostics",
           {{"max_norm_drift_rate", d.max_norm_drift_rate},
            {"max_hermiticity_defect", d.max_hermiticity_defect},
            {"max_trace_error", d.max_trace_error},
            {"min_eigenvalue", d.min_eigenvalue},
            {"max_boundary_mass", d.max_boundary_mass},
            {"refine_change", d.refine_change},
            {"max_imag_residue", d.max_imag_residue}}},
          {"warnings", d.warnings},
          {"checks", checks_json(r.checks)},
          {"rows", rows},
          {"config", to_json(cfg)}};
}

ordered_json summary_json(const Report& r, const RunConfig& cfg, const std::string& command) {
  return {{"command", command},
          {"all_passed", r.all_passed()},
          {"warnings", r.warnings},
          {"checks", checks_json(r.checks)},
          {"extra", r.extra},
          {"config", to_json(cfg)}};
}

ordered_json summary_json(const CostReport& r, const RunConfig& cfg) {
  ordered_json rows = ordered_json::array();
  for (const auto& c : r.rows) {
    rows.push_back({{"particles", c.particles},
                    {"pair_evals_full", c.pair_evals_full},
                    {"pair_evals_rb", c.pair_evals_rb},
                    {"build_seconds_full", c.build_seconds_full},
                    {"build_seconds_rb", c.build_seconds_rb}});
  }
  ordered_json shuffle = ordered_json::array();
  for (const auto& s : r.shuffle) shuffle.push_back({{"labels", s.labels}, {"seconds", s.seconds_per_shuffle}});
  ordered_json j = summary_json(r.report, cfg, "cost");
  j["rows"] = rows;
  j["shuffle"] = shuffle;
  j["shuffle_exponent"] = finite_or_null(r.shuffle_exponent);
  return j;
}

void write_outputs(const RunConfig& cfg, const std::vector<SweepRow>* rows, const ordered_json& summary, bool timings) {
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  if (rows != nullptr) {
    std::ofstream csv(dir / "rows.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (dir / "rows.csv").string());
    write_rows_csv(*rows, csv, timings);
  }
  std::ofstream js(dir / "summary.json");
  if (!js) throw std::runtime_error("cannot write " + (dir / "summary.json").string());
  js << summary.dump(2) << '\n';
}

}  // namespace rbq
