// rbq: command-line front end for the random-batch sweeps and checks.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "rbq/container.hpp"
#include "rbq/harness.hpp"
#include "rbq/wigner.hpp"

using nlohmann::ordered_json;

namespace {

void print_checks(const std::vector<rbq::CheckItem>& checks, const std::vector<std::string>& warnings) {
  for (const auto& c : checks) {
    std::printf("%s  %-44s value=%-12.4g limit=%-10.4g %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.limit, c.detail.c_str());
  }
  for (const auto& w : warnings) std::printf("WARN  %s\n", w.c_str());
}

void print_rows(const std::vector<rbq::SweepRow>& rows) {
  std::printf("%-9s %3s %4s %6s %9s %5s %12s %10s %12s %10s %12s %12s\n", "kind", "N", "M", "hbar", "dt", "K",
              "trace_dist", "se", "dual_lb", "se", "theorem", "naive");
  for (const auto& r : rows) {
    std::printf("%-9s %3zu %4zu %6.3g %9.5g %5zu %12.5e %10.3e %12.5e %10.3e %12.5g %12.5g\n", r.kind.c_str(),
                r.particles, r.points, r.hbar, r.dt, r.realizations, r.trace_distance, r.trace_distance_se,
                r.dual_norm, r.dual_norm_se, r.theorem_rhs, r.naive_trace_rhs);
  }
}

void dump_states(const rbq::SweepResult& r, const rbq::RunConfig& cfg) {
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  const std::pair<const char*, const rbq::DensityMatrix1*> items[] = {{"reference", &r.last_reference},
                                                                      {"ensemble_mean", &r.last_mean}};
  for (const auto& [name, rho] : items) {
    rbq::save_density(*rho, dir / (std::string(name) + ".rbq"));
    const rbq::WignerGrid w = rbq::wigner(*rho, rho->grid);
    rbq::save_wigner(w, dir / (std::string(name) + ".wig"));
    std::ofstream csv(dir / (std::string(name) + "_wigner.csv"));
    rbq::write_wigner_csv(w, csv);
  }
}

int report(const std::filesystem::path& dir) {
  std::ifstream in(dir / "summary.json");
  if (!in) {
    std::fprintf(stderr, "rbq: no summary.json in %s\n", dir.string().c_str());
    return 2;
  }
  const ordered_json s = ordered_json::parse(in);
  std::printf("command: %s\n", s.value("command", "?").c_str());
  if (s.contains("slope_trace_distance") && !s["slope_trace_distance"].is_null()) {
    std::printf("log-log slope (trace distance): %.4f\n", s["slope_trace_distance"].get<double>());
  }
  if (s.contains("slope_dual_norm") && !s["slope_dual_norm"].is_null()) {
    std::printf("log-log slope (dual norm):      %.4f\n", s["slope_dual_norm"].get<double>());
  }
  if (s.contains("rows") && s["rows"].is_array() && !s["rows"].empty() && s["rows"][0].contains("dt")) {
    std::printf("%9s %6s %12s %12s %14s %14s\n", "dt", "hbar", "trace_dist", "dual_lb", "dual/theorem", "trace/naive");
    for (const auto& row : s["rows"]) {
      std::printf("%9.5g %6.3g %12.5e %12.5e %14.4e %14.4e\n", row["dt"].get<double>(), row["hbar"].get<double>(),
                  row["trace_distance"].get<double>(), row["dual_norm_lb"].get<double>(),
                  row["measured_over_theorem"].get<double>(), row["trace_over_naive"].get<double>());
    }
  }
  int failed = 0;
  for (const auto& c : s.value("checks", ordered_json::array())) {
    const bool ok = c.value("passed", false);
    failed += ok ? 0 : 1;
    std::printf("%s  %s\n", ok ? "PASS" : "FAIL", c.value("name", "?").c_str());
  }
  for (const auto& w : s.value("warnings", ordered_json::array())) std::printf("WARN  %s\n", w.get<std::string>().c_str());
  return s.value("all_passed", false) && failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random batch method for N-body quantum dynamics: sweeps, checks and reports"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool print_config = false;
  app.add_option("-c,--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "override a config field, e.g. --set grid.points=64")->take_all();
  app.add_option("-o,--out", out_dir, "output directory (overrides output_dir)");
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  bool timings = false, dump = false;
  auto* converge = app.add_subcommand("converge", "dt convergence sweep");
  converge->add_flag("--timings", timings, "append wall-time columns to rows.csv");
  converge->add_flag("--dump-states", dump, "write reference and ensemble-mean densities and Wigner grids");
  auto* hbar = app.add_subcommand("hbar-sweep", "hbar uniformity sweep");
  hbar->add_flag("--timings", timings, "append wall-time columns to rows.csv");
  hbar->add_flag("--dump-states", dump, "write reference and ensemble-mean densities and Wigner grids");
  auto* cost = app.add_subcommand("cost", "pair-evaluation counts and shuffle timing");
  auto* rep = app.add_subcommand("report", "summarize a finished run");
  std::string report_dir;
  rep->add_option("dir", report_dir, "directory holding summary.json (default: output_dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    ordered_json doc = ordered_json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      doc = ordered_json::parse(in);
    }
    for (const auto& o : overrides) rbq::apply_override(doc, o);
    if (!out_dir.empty()) doc["output_dir"] = out_dir;
    const rbq::RunConfig cfg = rbq::config_from_json(doc);
    if (print_config) {
      std::cout << rbq::to_json(cfg).dump(2) << '\n';
      return 0;
    }

    if (verify->parsed()) {
      const rbq::Report r = rbq::verify_suite(cfg);
      print_checks(r.checks, r.warnings);
      rbq::write_outputs(cfg, nullptr, rbq::summary_json(r, cfg, "verify"));
      return r.all_passed() ? 0 : 1;
    }
    if (converge->parsed() || hbar->parsed()) {
      const bool is_converge = converge->parsed();
      const rbq::SweepResult r = is_converge ? rbq::run_convergence_sweep(cfg) : rbq::run_hbar_sweep(cfg);
      print_rows(r.rows);
      if (is_converge) std::printf("log-log slope: trace distance %.4f, dual norm %.4f\n", r.slope, r.slope_dual);
      print_checks(r.checks, r.diagnostics.warnings);
      rbq::write_outputs(cfg, &r.rows, rbq::summary_json(r, cfg, is_converge ? "converge" : "hbar-sweep"), timings);
      if (dump) dump_states(r, cfg);
      return r.all_passed() ? 0 : 1;
    }
    if (cost->parsed()) {
      const rbq::CostReport r = rbq::run_cost_bench(cfg);
      for (const auto& row : r.rows) {
        std::printf("N=%-4zu pairs full=%-8zu rb=%-8zu build full=%.3es rb=%.3es\n", row.particles,
                    row.pair_evals_full, row.pair_evals_rb, row.build_seconds_full, row.build_seconds_rb);
      }
      for (const auto& s : r.shuffle) std::printf("shuffle N=%-5zu %.3e s\n", s.labels, s.seconds_per_shuffle);
      print_checks(r.report.checks, r.report.warnings);
      rbq::write_outputs(cfg, nullptr, rbq::summary_json(r, cfg));
      return r.report.all_passed() ? 0 : 1;
    }
    if (rep->parsed()) return report(std::filesystem::path(report_dir.empty() ? cfg.output_dir : report_dir));
  } catch (const rbq::FormatError& e) {
    std::fprintf(stderr, "rbq: format error in field '%s': %s\n", e.field().c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rbq: %s\n", e.what());
    return 2;
  }
  return 0;
}
