#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tsdia/cli/commands.hpp"
#include "tsdia/cli/config.hpp"
#include "tsdia/cli/report.hpp"
#include "tsdia/cli/verify.hpp"
#include "tsdia/errors.hpp"

using namespace tsdia;
using namespace tsdia::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("tsdia_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& file) {
  std::ifstream is(file, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& file) { return Json::parse(slurp(file)); }

std::string config_error_path(const Json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

Json small_markov() {
  return Json::parse(R"({
    "model": "markov",
    "kernel": {"kind": "ou", "lambda0": 1.0, "sigma_b2": 0.0},
    "oscillator": {"nu": 0.5},
    "grid": {"dt": 0.01, "t_max": 2.0},
    "ensemble": {"n_realizations": 200, "master_seed": 3, "sampler": "ou"}
  })");
}

}  // namespace

TEST_CASE("config defaults and round trip") {
  const ExperimentConfig cfg = parse_config(Json::object());
  CHECK(cfg.model == OscillatorModel::markov);
  CHECK(cfg.grid.dt == 0.01);
  CHECK(cfg.methods.size() == 2);
  const Json j = to_json(cfg);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(to_json(parse_config(j)) == j);

  const Json full = Json::parse(R"({
    "model": "non-markov", "methods": ["dia"],
    "kernel": {"kind": "tsallis", "q": 1.3, "lambda0": 0.5, "sigma_b2": 2.0},
    "oscillator": {"nu": 1.0, "mu": 0.0},
    "grid": {"dt": 0.02, "t_max": 3.0},
    "ensemble": {"n_realizations": 10, "master_seed": 18446744073709551615, "sampler": "compound-ou"},
    "closure": {"laplace": false, "laplace_stride": 5},
    "compare": {"curves": [{"source": "volterra", "method": "dia"}, {"source": "file", "file": "x.csv", "name": "x"}],
                "tolerances": {"max_abs": 0.1, "z_max": 2.0}},
    "outputs": {"directory": "elsewhere", "formats": ["json"]}
  })");
  const ExperimentConfig c = parse_config(full);
  CHECK(c.ensemble.master_seed == 18446744073709551615ULL);
  CHECK(c.compare.curves[1].source == CurveSource::file);
  CHECK(c.compare.tolerances.max_abs == 0.1);
  CHECK_FALSE(c.outputs.csv);
  CHECK(to_json(parse_config(to_json(c))) == to_json(c));
}

TEST_CASE("config rejects unknown keys with their path") {
  CHECK(config_error_path(Json::parse(R"({"colour": 1})")) == "colour");
  CHECK(config_error_path(Json::parse(R"({"kernel": {"qq": 1}})")) == "kernel.qq");
  CHECK(config_error_path(Json::parse(R"({"compare": {"curves": [{"source": "oracle"}, {"source": "oracle", "x": 1}]}})")) ==
        "compare.curves[1].x");
  CHECK(config_error_path(Json::parse(R"({"compare": {"curves": [{"source": "oracle"}, {"source": "guess"}]}})")) ==
        "compare.curves[1].source");
}

TEST_CASE("config rejects invalid values") {
  CHECK(config_error_path(Json::parse(R"({"kernel": {"q": "big"}})")) == "kernel.q");
  CHECK(config_error_path(Json::parse(R"({"kernel": {"lambda0": -1}})")) == "kernel.lambda0");
  CHECK(config_error_path(Json::parse(R"({"kernel": {"sigma_b2": -1}})")) == "kernel.sigma_b2");
  CHECK(config_error_path(Json::parse(R"({"grid": {"dt": 0}})")) == "grid.dt");
  CHECK(config_error_path(Json::parse(R"({"oscillator": {"nu": -1}})")) != "<none>");
  CHECK(config_error_path(Json::parse(R"({"model": "full-kernel", "oscillator": {"nu": 1}})")) != "<none>");
  CHECK(config_error_path(Json::parse(R"({"ensemble": {"n_realizations": 1}})")) == "ensemble.n_realizations");
  CHECK(config_error_path(Json::parse(R"({"ensemble": {"sampler": "compound-ou"}})")) == "kernel.q");
  CHECK(config_error_path(Json::parse(R"({"kernel": {"q": 0.8}, "ensemble": {"sampler": "gaussian-qexp"}})")) ==
        "kernel.allow_subunit_q");
  CHECK(config_error_path(Json::parse(R"({"grid": {"dt": 0.0001, "t_max": 5}, "ensemble": {}})")) == "grid");
  CHECK(config_error_path(Json::parse(R"({"outputs": {"formats": ["png"]}})")) == "outputs.formats[0]");
  CHECK(config_error_path(Json::parse(R"({"schema_version": 7})")) == "schema_version");
  CHECK(config_error_path(Json::parse(R"([1, 2])")) != "<none>");
  CHECK(config_error_path(Json::parse(R"({"compare": {"tolerances": {"z_fraction": 2}}})")) ==
        "compare.tolerances.z_fraction");
}

TEST_CASE("closure problems from config") {
  ExperimentConfig cfg = parse_config(Json::parse(R"({"model": "non-markov", "kernel": {"kind": "ou", "lambda0": 0.2}, "oscillator": {"nu": 2}})"));
  const ClosureProblem p = cfg.closure_problem(ClosureMethod::dia);
  CHECK(p.model == ClosureModel::non_markov);
  CHECK(p.nu == 2.0);
  CHECK(p.kernel.kind() == KernelKind::ou);
  cfg.kernel.sigma_b2 = 0.0;
  CHECK_THROWS_AS(cfg.closure_problem(ClosureMethod::dia), ConfigError);
}

TEST_CASE("load_config from plain JSON, reports and CSV preambles") {
  TempDir tmp("load");
  const ExperimentConfig cfg = parse_config(small_markov());
  {
    std::ofstream(tmp.path / "plain.json") << small_markov().dump();
    std::ofstream(tmp.path / "report.json") << Json{{"schema_version", 1}, {"config", to_json(cfg)}}.dump();
    std::ofstream csv(tmp.path / "curve.csv");
    for (const auto& line : csv_preamble(cfg)) csv << "# " << line << '\n';
    csv << "t,re,im\n0,1,0\n";
    std::ofstream(tmp.path / "broken.json") << "{ not json";
  }
  CHECK(to_json(load_config(tmp.path / "plain.json")) == to_json(cfg));
  CHECK(to_json(load_config(tmp.path / "report.json")) == to_json(cfg));
  CHECK(to_json(load_config(tmp.path / "curve.csv")) == to_json(cfg));
  CHECK_THROWS_AS(load_config(tmp.path / "broken.json"), ConfigError);
  CHECK_THROWS_AS(load_config(tmp.path / "missing.json"), ConfigError);

  const auto preamble = csv_preamble(cfg);
  CHECK(preamble.front() == "schema_version: 1");
  CHECK(preamble.back() == "master_seed: 3");

  CommandOptions opts;
  opts.seed = 99;
  CHECK(resolve_config(tmp.path / "plain.json", opts).ensemble.master_seed == 99);
}

TEST_CASE("verify suites all pass") {
  for (const auto& suite : verify_suites()) {
    CAPTURE(suite);
    const VerifyReport r = run_suite(suite);
    CHECK(r.pass());
    CHECK_FALSE(r.checks.empty());
    const Json j = to_json(r);
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["suite"] == suite);
  }
  CHECK_THROWS_AS(run_suite("appendix-z"), ConfigError);
}

TEST_CASE("verify appendix-d names both properties") {
  const VerifyReport r = run_suite("appendix-d");
  bool p1 = false, p2 = false;
  for (const auto& c : r.checks) {
    p1 = p1 || (c.name.find("Property 1") != std::string::npos && c.pass);
    p2 = p2 || (c.name.find("Property 2") != std::string::npos && c.pass);
  }
  CHECK(p1);
  CHECK(p2);
}

TEST_CASE("cmd_verify writes its report") {
  TempDir tmp("verify");
  std::ostringstream log;
  CommandOptions opts;
  opts.out = tmp.path;
  CHECK(cmd_verify("qcore", opts, log) == kSuccess);
  CHECK(read_json(tmp.path / "verify_qcore.json")["pass"] == true);
  CHECK(log.str().find("PASS") != std::string::npos);
}

TEST_CASE("simulate: noise-free run matches the oracle and is deterministic") {
  TempDir tmp("simulate");
  const ExperimentConfig cfg = parse_config(small_markov());
  std::ostringstream log;
  CommandOptions opts;
  opts.out = tmp.path / "a";
  CHECK(cmd_simulate(cfg, opts, log) == kSuccess);
  const Json summary = read_json(tmp.path / "a" / "simulate.json");
  CHECK(summary["pass"] == true);
  CHECK(summary["schema_version"] == kSchemaVersion);
  CHECK(summary["oracle"]["max_abs"].get<double>() <= 1e-8);
  CHECK(fs::exists(tmp.path / "a" / "simulate_oracle.csv"));

  const ExperimentConfig again = load_config(tmp.path / "a" / "simulate_monte_carlo.csv");
  opts.out = tmp.path / "b";
  opts.threads = 3;
  CHECK(cmd_simulate(again, opts, log) == kSuccess);
  for (const char* f : {"simulate_monte_carlo.csv", "simulate_oracle.csv", "simulate.json"})
    CHECK(slurp(tmp.path / "a" / f) == slurp(tmp.path / "b" / f));
}

TEST_CASE("simulate without an oracle still succeeds") {
  TempDir tmp("simulate_nm");
  Json j = small_markov();
  j["model"] = "non-markov";
  j["kernel"]["sigma_b2"] = 0.5;
  j["oscillator"]["nu"] = 1.0;
  const ExperimentConfig cfg = parse_config(j);
  CHECK_FALSE(simulation_oracle(cfg).has_value());
  std::ostringstream log;
  CommandOptions opts;
  opts.out = tmp.path;
  CHECK(cmd_simulate(cfg, opts, log) == kSuccess);
  CHECK(read_json(tmp.path / "simulate.json")["oracle"].is_null());
  CHECK_FALSE(fs::exists(tmp.path / "simulate_oracle.csv"));
}

TEST_CASE("closure command outputs") {
  TempDir tmp("closure");
  const ExperimentConfig cfg = parse_config(Json::parse(R"({
    "model": "markov", "kernel": {"kind": "ou", "lambda0": 0.2, "sigma_b2": 1.0},
    "oscillator": {"nu": 0.3}, "grid": {"dt": 0.01, "t_max": 5.0}})"));
  std::ostringstream log;
  CommandOptions opts;
  opts.out = tmp.path;
  CHECK(cmd_closure(cfg, opts, log) == kSuccess);
  for (const char* f : {"closure_markov_perturbative_time.csv", "closure_markov_perturbative_laplace.csv",
                        "closure_markov_dia_time.csv", "closure_markov_dia_laplace.csv", "closure.json"})
    CHECK(fs::exists(tmp.path / f));
  const Json j = read_json(tmp.path / "closure.json");
  for (const auto& c : j["curves"]) CHECK(c["cross_domain_max_abs"].get<double>() <= 2e-3);

  const ExperimentConfig white = parse_config(Json::parse(R"({
    "model": "non-markov", "methods": ["dia"], "kernel": {"kind": "white", "lambda0": 50, "sigma_b2": 50},
    "oscillator": {"nu": 1}, "grid": {"dt": 0.01, "t_max": 2}, "closure": {"laplace": false}})"));
  CHECK(cmd_closure(white, opts, log) == kSuccess);
  CHECK(fs::exists(tmp.path / "closure_non-markov_dia_closed_form.csv"));
}

TEST_CASE("compare_curves") {
  const TimeGrid g = TimeGrid::covering(0.1, 1.0);
  GreenFunction a = noise_free_green({OscillatorModel::markov, 1.0, 0.0}, g);
  a.label = "a";
  GreenFunction b = a;
  b.label = "b";
  Tolerances tol;
  tol.max_abs = 1e-12;
  const CurveComparison same = compare_curves(a, b, tol);
  CHECK(same.max_abs == 0.0);
  CHECK(same.rms == 0.0);
  CHECK(same.pass);
  CHECK(same.z_nodes == 0);

  b.values[5] += 0.01;
  const CurveComparison off = compare_curves(a, b, tol);
  CHECK(off.max_abs == doctest::Approx(0.01));
  CHECK_FALSE(off.pass);

  GreenFunction coarse = noise_free_green({OscillatorModel::markov, 1.0, 0.0}, TimeGrid(0.2, 5));
  CHECK(compare_curves(a, coarse, tol).pass);
  CHECK(compare_curves(coarse, a, tol).max_abs <= 1e-15);
  GreenFunction odd = noise_free_green({OscillatorModel::markov, 1.0, 0.0}, TimeGrid(0.15, 6));
  CHECK_THROWS_AS(compare_curves(a, odd, tol), GridMismatch);

  GreenFunction mc = a;
  mc.std_error = Eigen::MatrixX2d::Constant(g.size(), 2, 0.01);
  mc.std_error->row(0).setZero();
  mc.values[3] += 0.05;
  Tolerances ztol;
  ztol.z_fraction = 1.0;
  const CurveComparison z = compare_curves(a, mc, ztol);
  CHECK(z.z_nodes == g.steps());
  CHECK(z.max_abs_z == doctest::Approx(5.0));
  CHECK_FALSE(z.pass);
  for (double v : z.z) CHECK(std::isfinite(v));
}

TEST_CASE("compare command") {
  TempDir tmp("compare");
  Json j = small_markov();
  j["kernel"]["sigma_b2"] = 1.0;
  j["ensemble"]["n_realizations"] = 2000;
  j["compare"] = Json::parse(R"({"curves": [{"source": "oracle"}, {"source": "monte-carlo"}]})");
  std::ostringstream log;
  CommandOptions opts;
  opts.out = tmp.path;
  CHECK(cmd_compare(parse_config(j), opts, log) == kSuccess);
  const Json r = read_json(tmp.path / "compare.json");
  CHECK(r["report"]["pass"] == true);
  CHECK(r["config"]["ensemble"]["master_seed"] == 3);

  j["compare"] = Json::parse(R"({"curves": [{"source": "oracle"}]})");
  CHECK_THROWS_AS(cmd_compare(parse_config(j), opts, log), ConfigError);

  // identical closure curves give a zero-error report
  Json c = Json::parse(R"({"model": "markov", "kernel": {"kind": "ou", "lambda0": 0.2},
    "grid": {"dt": 0.01, "t_max": 3},
    "compare": {"curves": [{"source": "volterra", "method": "dia", "name": "x"},
                           {"source": "volterra", "method": "dia", "name": "y"}],
                "tolerances": {"max_abs": 0}}})");
  CHECK(cmd_compare(parse_config(c), opts, log) == kSuccess);
  CHECK(read_json(tmp.path / "compare.json")["report"]["comparisons"][0]["max_abs"] == 0.0);

  // a file curve on an incompatible grid
  write_green_csv(noise_free_green({OscillatorModel::markov, 0.0, 0.0}, TimeGrid(0.015, 100)), tmp.path / "odd.csv");
  c["compare"]["curves"][1] = {{"source", "file"}, {"file", (tmp.path / "odd.csv").string()}};
  CHECK_THROWS_AS(cmd_compare(parse_config(c), opts, log), ConfigError);
}

TEST_CASE("write_atomically leaves no temporary behind") {
  TempDir tmp("atomic");
  write_json_atomically(tmp.path / "x.json", Json{{"a", 1}});
  int n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(tmp.path)) ++n;
  CHECK(n == 1);
  CHECK(read_json(tmp.path / "x.json")["a"] == 1);
}
