#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dnls/report_io.hpp"
#include "dnls/scenario.hpp"

using namespace dnls;
namespace fs = std::filesystem;

namespace {

std::string small_cfg(const std::string& extra = "") {
  return "[grid]\nL = 40\nN = 512\n"
         "[profile]\nkind = gaussian\namplitude = 0.1\n"
         "[spectral]\ntaus = 2, 8\n"
         "[flow]\nkind = dnls\nT = 0.01\ndt = 1e-3\nsnapshot_stride = 2\n"
         "[sweep]\namplitudes = 0.05, 0.1\ntaus = 2, 8\ns = 0.25\n"
         "[output]\ndir = OUTDIR\n" +
         extra;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("dnls_test_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ScenarioConfig cfg_with_out(const std::string& text, const fs::path& out) {
  std::string t = text;
  const auto pos = t.find("OUTDIR");
  t.replace(pos, 6, out.string());
  return ScenarioConfig::parse(t, "test.cfg");
}

}  // namespace

TEST_CASE("config parsing and diagnostics") {
  TempDir tmp("cfg");
  ScenarioConfig cfg = cfg_with_out(small_cfg(), tmp.path / "o");
  CHECK(cfg.grid_N == 512);
  CHECK(cfg.taus == std::vector<double>{2.0, 8.0});
  CHECK(cfg.flow == ScenarioConfig::Flow::dnls);

  CHECK_THROWS_WITH_AS(ScenarioConfig::parse("[grid]\nbogus = 1\n", "x.cfg"),
                       doctest::Contains("x.cfg:2"), std::runtime_error);
  CHECK_THROWS_WITH_AS(ScenarioConfig::parse("[grid]\nL 40\n", "x.cfg"),
                       doctest::Contains("key = value"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      ScenarioConfig::parse("[spectral]\ntaus = 0.5, 8\n", "x.cfg"),
      doctest::Contains("spectral parameter below unit threshold"), std::runtime_error);
  CHECK_THROWS_WITH_AS(ScenarioConfig::parse("[tolerances]\nnot_a_check = 1\n", "x.cfg"),
                       doctest::Contains("unknown tolerance"), std::runtime_error);
  CHECK_THROWS_WITH_AS(ScenarioConfig::parse("[verify]\nchecks = nonsense\n", "x.cfg"),
                       doctest::Contains("unknown check"), std::runtime_error);
  CHECK_THROWS_WITH_AS(ScenarioConfig::parse("[spectral]\ntaus = 2, 8\nbranches = 1\n", "x.cfg"),
                       doctest::Contains("branches"), std::runtime_error);

  // hash is stable under reordering and comments, sensitive to values
  ScenarioConfig a = ScenarioConfig::parse("[grid]\nL = 40\nN = 256\n[spectral]\ntaus=2,8\n", "a");
  ScenarioConfig b =
      ScenarioConfig::parse("[grid]\n# comment\nN = 256\nL = 40\n[spectral]\ntaus=2,8\n", "b");
  ScenarioConfig c = ScenarioConfig::parse("[grid]\nL = 20\nN = 256\n[spectral]\ntaus=2,8\n", "c");
  CHECK(config_hash(a.canonical) == config_hash(b.canonical));
  CHECK(config_hash(a.canonical) != config_hash(c.canonical));
}

TEST_CASE("zero profile scenario passes every enabled check") {
  TempDir tmp("zero");
  ScenarioConfig cfg = cfg_with_out(small_cfg("[verify]\nchecks = identity, a_consistency, "
                                              "gradient, bracket, branch_parity, "
                                              "flow_conservation, continuity\n"),
                                    tmp.path / "o");
  cfg.profile = ProfileSpec::make_zero();
  CHECK(run_verify(cfg) == 0);

  auto j = nlohmann::json::parse(slurp(tmp.path / "o" / "report.json"));
  CHECK(j["pass"] == true);
  CHECK(j["checks"].size() > 0);
  for (const auto& row : j["checks"]) CHECK(double(row["residual"]) <= 1e-10);
}

TEST_CASE("smoke scenario verifies and reproduces bit-identical artifacts") {
  TempDir tmp("smoke");
  ScenarioConfig cfg = cfg_with_out(
      small_cfg("[verify]\nchecks = identity, gradient, bracket, branch_parity, "
                "flow_conservation, continuity\n"),
      tmp.path / "a");
  CHECK(run_verify(cfg) == 0);
  CHECK(run_sweep(cfg) == 0);
  CHECK(run_greens(cfg, "fixed_point") == 0);
  CHECK(run_evolve(cfg) == 0);

  ScenarioConfig cfg2 = cfg;
  cfg2.out_dir = (tmp.path / "b").string();
  CHECK(run_verify(cfg2) == 0);
  CHECK(run_sweep(cfg2) == 0);
  CHECK(run_greens(cfg2, "fixed_point") == 0);
  CHECK(run_evolve(cfg2) == 0);

  for (const char* name : {"sweep.csv", "greens_tau2.csv", "greens_tau8.csv",
                           "trajectory.csv"}) {
    CAPTURE(name);
    CHECK(slurp(tmp.path / "a" / name) == slurp(tmp.path / "b" / name));
    CHECK(!slurp(tmp.path / "a" / name).empty());
  }
  // report rows are numerically identical; only started_at may differ
  auto ja = nlohmann::json::parse(slurp(tmp.path / "a" / "report.json"));
  auto jb = nlohmann::json::parse(slurp(tmp.path / "b" / "report.json"));
  CHECK(ja["checks"] == jb["checks"]);
  CHECK(ja["config_hash"] == jb["config_hash"]);
}

TEST_CASE("file profile round trip") {
  TempDir tmp("file");
  auto g = make_grid(40.0, 256);
  FieldPair pair = sample_profile(ProfileSpec::make_gaussian(0.1, 1.0, 0.5, 0.1), g);
  const fs::path csv = tmp.path / "profile.csv";
  {
    std::ofstream out(csv);
    for (const auto& v : pair.q.values())
      out << fmt_double(v.real()) << "," << fmt_double(v.imag()) << "\n";
  }
  FieldPair loaded = sample_profile(ProfileSpec::make_file(csv.string()), g);
  CHECK(sup_diff(loaded.q, pair.q) == 0.0);
  CHECK(loaded.gauge_flag);

  CHECK_THROWS_WITH_AS(sample_profile(ProfileSpec::make_file("/nonexistent.csv"), g),
                       doctest::Contains("missing"), std::runtime_error);
  {
    std::ofstream out(csv, std::ios::app);
    out << "0,0\n";  // one row too many
  }
  CHECK_THROWS_WITH_AS(sample_profile(ProfileSpec::make_file(csv.string()), g),
                       doctest::Contains("expected"), std::runtime_error);
}

TEST_CASE("invariants pipeline writes the json and asymptotics artifacts") {
  TempDir tmp("inv");
  ScenarioConfig cfg = cfg_with_out(small_cfg(), tmp.path / "o");
  CHECK(run_invariants(cfg) == 0);
  auto j = nlohmann::json::parse(slurp(tmp.path / "o" / "invariants.json"));
  CHECK(j.contains("a_values"));
  CHECK(j["a_values"].size() == 2);
  CHECK(j.contains("gradient"));
  CHECK(j.contains("poisson_bracket"));
  CHECK(fs::exists(tmp.path / "o" / "asymptotics.csv"));
}

TEST_CASE("overrides") {
  TempDir tmp("ovr");
  ScenarioConfig base = cfg_with_out(small_cfg(), tmp.path / "o");
  ScenarioOverrides o;
  o.tau = 4.0;
  o.amplitude = 0.05;
  o.dt = 5e-4;
  o.flow = std::string("akappa");
  ScenarioConfig cfg = apply_overrides(base, o);
  CHECK(cfg.taus[0] == 4.0);
  CHECK(cfg.generator_tau == 4.0);
  CHECK(cfg.profile.amplitude == 0.05);
  CHECK(cfg.dt == 5e-4);
  CHECK(cfg.flow == ScenarioConfig::Flow::akappa);

  ScenarioOverrides bad;
  bad.tau = 0.2;
  CHECK_THROWS(apply_overrides(base, bad));
}
