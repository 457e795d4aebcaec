#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "rbq/config.hpp"
#include "rbq/harness.hpp"

using namespace rbq;
using nlohmann::ordered_json;

namespace {

std::string config_error(const ordered_json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("defaults validate and round-trip through JSON") {
  const RunConfig def;
  CHECK_NOTHROW(validate(def));
  const ordered_json j = to_json(def);
  const RunConfig back = config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(config_from_json(ordered_json::object()).points == def.points);
  CHECK(j.at("grid").at("points") == 32);
  CHECK(j.at("substeps").at("scheme") == "suzuki4");
}

TEST_CASE("non-default values survive the round trip") {
  RunConfig c;
  c.potential = PotentialSpec::tabulated({1.0, 0.5, 0.0}, 0.25);
  c.initial.mixture = {{0.25, {{-1, 0, 1, 2}, {}, {}}}, {0.75, {}}};
  c.dts = {0.5, 0.1};
  c.ensemble.sampling = "independent";
  c.substeps.scheme = "strang";
  c.substeps.rb_per_unit = 32;
  const RunConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.potential.kind == PotentialSpec::Kind::tabulated);
  CHECK(back.initial.mixture.size() == 2);
  CHECK(back.initial.mixture[0].orbitals.centers[3] == 2.0);
  CHECK(back.substeps.split_scheme() == SplitScheme::strang);
  CHECK(back.substeps.rb().for_interval(0.25) == 8);
}

TEST_CASE("unknown keys and ill-typed values name the offending path") {
  CHECK(contains(config_error({{"grid", {{"nope", 1}}}}), "grid.nope"));
  CHECK(contains(config_error({{"bogus", true}}), "bogus"));
  CHECK(contains(config_error({{"grid", {{"points", "many"}}}}), "grid.points"));
  CHECK(contains(config_error({{"particles", 3}}), "particles"));
  CHECK(contains(config_error({{"particles", -2}}), "particles"));
  CHECK(contains(config_error({{"dt", {0.1, -0.1}}}), "dt"));
  CHECK(contains(config_error({{"potential", {{"kind", "yukawa"}}}}), "potential.kind"));
  CHECK(contains(config_error({{"substeps", {{"scheme", "euler"}}}}), "substeps.scheme"));
  CHECK(contains(config_error({{"ensemble", {{"sampling", "stratified"}}}}), "ensemble.sampling"));
  CHECK(contains(config_error({{"grid", {{"points", 48}}}}), "grid"));
  CHECK(contains(config_error({{"particles", 8}, {"grid", {{"points", 64}}}}), "amplitude_cap"));
  CHECK(contains(config_error({{"initial_state", {{"widths", {1, 1, 0, 1}}}}}),
                 "initial_state.widths"));
  CHECK(contains(config_error({{"initial_state", {{"mixture", {{{"weight", 0.5}}}}}}}),
                 "initial_state.mixture: weights must sum to 1"));
  CHECK(contains(config_error({{"initial_state", {{"mixture", {{{"weight", 1.0}, {"orbitals", 1}}}}}}}),
                 "initial_state.mixture[0].orbitals: unknown key"));
  CHECK(contains(config_error({{"hbar_sweep", {{"hbars", {1.0}}}}}), "hbar_sweep"));
}

TEST_CASE("overrides") {
  ordered_json doc = to_json(RunConfig{});
  apply_override(doc, "grid.points=64");
  apply_override(doc, "potential.kind=cosine");
  apply_override(doc, "potential.wavenumber=2.5");
  apply_override(doc, "dt=[0.5,0.25]");
  apply_override(doc, "substeps.refine_check=false");
  const RunConfig c = config_from_json(doc);
  CHECK(c.points == 64);
  CHECK(c.potential.kind == PotentialSpec::Kind::cosine);
  CHECK(c.potential.wavenumber == 2.5);
  CHECK(c.dts == std::vector<double>{0.5, 0.25});
  CHECK_FALSE(c.substeps.refine_check);

  ordered_json fresh = ordered_json::object();
  apply_override(fresh, "ensemble.realizations=10");
  CHECK(config_from_json(fresh).ensemble.realizations == 10);

  CHECK_THROWS_AS(apply_override(doc, "grid.points"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "grid..points=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "grid.points.x=1"), ConfigError);
  apply_override(doc, "grid.nope=1");
  CHECK(contains(config_error(doc), "grid.nope"));
}

TEST_CASE("config files") {
  const auto path = std::filesystem::temp_directory_path() / "rbq_test_config.json";
  {
    std::ofstream out(path);
    out << R"({"grid": {"hbar": 0.25}, "t_final": 0.5})";
  }
  const RunConfig c = load_config(path);
  CHECK(c.hbar == 0.25);
  CHECK(c.t_final == 0.5);
  {
    std::ofstream out(path);
    out << "{not json";
  }
  CHECK_THROWS_AS(load_config(path), ConfigError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path), ConfigError);
}

TEST_CASE("worker count honours RBQ_THREADS") {
  RunConfig c;
  c.threads = 6;
  ::unsetenv("RBQ_THREADS");
  CHECK(worker_count(c) == 6);
  ::setenv("RBQ_THREADS", "2", 1);
  CHECK(worker_count(c) == 2);
  ::setenv("RBQ_THREADS", "16", 1);
  CHECK(worker_count(c) == 6);
  ::setenv("RBQ_THREADS", "junk", 1);
  CHECK(worker_count(c) == 6);
  ::setenv("RBQ_THREADS", "1", 1);
  c.threads = 0;
  CHECK(worker_count(c) == 1);
  ::unsetenv("RBQ_THREADS");
  CHECK(worker_count(c) >= 1);
}

TEST_CASE("initial state construction") {
  RunConfig c;
  const GridSpec g = c.grid();
  const auto orb = build_orbitals({}, g, 4);
  REQUIRE(orb.size() == 4);
  const auto states = build_initial_state(c, g);
  REQUIRE(states.size() == 1);
  CHECK(states[0].weight == 1.0);
  CHECK(std::abs(states[0].psi.norm() - 1.0) <= 1e-12);
  const auto expected = WaveFunctionN::product(g, std::vector<std::vector<cplx>>{
                                                      gaussian_orbital(g, -2.25, 1.0), gaussian_orbital(g, -0.75, 1.0),
                                                      gaussian_orbital(g, 0.75, 1.0), gaussian_orbital(g, 2.25, 1.0)});
  CHECK(states[0].psi.distance(expected) <= 1e-14);

  c.initial.mixture = {{0.4, {}}, {0.6, {{0, 1, 2, 3}, {}, {}}}};
  const auto mix = build_initial_state(c, g);
  REQUIRE(mix.size() == 2);
  CHECK(mix[0].weight + mix[1].weight == doctest::Approx(1.0));

  c.initial = {};
  c.initial.symmetrize = true;
  const auto sym = build_initial_state(c, g)[0].psi;
  const std::vector<std::size_t> swap{1, 0, 2, 3};
  CHECK(sym.distance(sym.permuted_axes(swap)) <= 1e-12);

  const auto path = std::filesystem::temp_directory_path() / "rbq_test_initial.rbq";
  save_state(expected, path);
  c.initial = {};
  c.initial.kind = "file";
  c.initial.path = path.string();
  CHECK(build_initial_state(c, g)[0].psi.distance(expected) == 0.0);
  c.hbar = 1.0;
  CHECK_THROWS_AS(build_initial_state(c, c.grid()), ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("RFC 4180 field quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(csv_field("") == "");
}
