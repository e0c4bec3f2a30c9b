#include "tsdia/cli/commands.hpp"

#include <ostream>

#include "tsdia/cli/verify.hpp"
#include "tsdia/errors.hpp"
#include "tsdia/gamma_compound.hpp"

namespace tsdia::cli {

namespace {

std::filesystem::path output_dir(const ExperimentConfig& cfg, const CommandOptions& opts) {
  return opts.out ? *opts.out : std::filesystem::path(cfg.outputs.directory);
}

void emit_csv(const GreenFunction& g, const std::filesystem::path& file, const ExperimentConfig& cfg) {
  write_atomically(file, [&](const std::filesystem::path& tmp) { write_green_csv(g, tmp, csv_preamble(cfg)); });
}

Json report_header(const ExperimentConfig& cfg, const char* command) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"master_seed", cfg.ensemble.master_seed},
          {"config", to_json(cfg)}};
}

GreenFunction monte_carlo_curve(const ExperimentConfig& cfg, int threads) {
  const TimeGrid grid = cfg.time_grid();
  const EnsembleSpec spec{cfg.ensemble.n_realizations, cfg.ensemble.master_seed, cfg.ensemble.sampler};
  EnsembleOptions options;
  options.threads = threads;
  GreenFunction g = ensemble_mean_green(spec, cfg.noise_params(), cfg.oscillator, grid, options);
  g.label = "monte-carlo";
  return g;
}

GreenFunction closure_curve(const ExperimentConfig& cfg, CurveSource source, ClosureMethod method) {
  const ClosureProblem prob = cfg.closure_problem(method);
  const TimeGrid grid = cfg.time_grid();
  GreenFunction g = [&] {
    switch (source) {
      case CurveSource::volterra: return solve_time_domain(prob, grid);
      case CurveSource::laplace: return laplace_inverted_green(prob, grid, {}, cfg.closure.laplace_stride);
      default: return closed_form_green(prob, grid);
    }
  }();
  return g;
}

}  // namespace

ExperimentConfig resolve_config(const std::filesystem::path& file, const CommandOptions& opts) {
  ExperimentConfig cfg = load_config(file);
  if (opts.seed) cfg.ensemble.master_seed = *opts.seed;
  return cfg;
}

int cmd_verify(const std::string& suite, const CommandOptions& opts, std::ostream& log) {
  const VerifyReport r = run_suite(suite);
  for (const auto& c : r.checks) {
    log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value << ' ' << c.relation << ' ' << c.threshold
        << '\n';
  }
  const std::filesystem::path dir = opts.out ? *opts.out : std::filesystem::path("out");
  write_json_atomically(dir / ("verify_" + suite + ".json"), to_json(r));
  return r.pass() ? kSuccess : kCheckFailure;
}

std::optional<GreenFunction> simulation_oracle(const ExperimentConfig& cfg) {
  const TimeGrid grid = cfg.time_grid();
  if (cfg.kernel.sigma_b2 == 0.0) return noise_free_green(cfg.oscillator, grid);
  if (cfg.model != OscillatorModel::markov) return std::nullopt;
  const double nu = cfg.oscillator.nu;
  switch (cfg.ensemble.sampler) {
    case SamplerKind::ou: return exact_markov_mean(NoiseKernel::ou(cfg.kernel.sigma_b2, cfg.kernel.lambda0), nu, grid);
    case SamplerKind::gaussian_qexp: return exact_markov_mean(cfg.noise_params().kernel(), nu, grid);
    case SamplerKind::compound_ou:
      return exact_compound_markov_mean(params_from_tsallis(cfg.kernel.lambda0, QIndex(cfg.kernel.q)),
                                        cfg.kernel.sigma_b2, nu, grid);
  }
  return std::nullopt;
}

int cmd_simulate(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& log) {
  validate_simulation(cfg);
  const std::filesystem::path dir = output_dir(cfg, opts);
  const GreenFunction mc = monte_carlo_curve(cfg, opts.threads);
  const std::optional<GreenFunction> oracle = simulation_oracle(cfg);

  Json summary = report_header(cfg, "simulate");
  Json files = Json::array();
  if (cfg.outputs.csv) {
    emit_csv(mc, dir / "simulate_monte_carlo.csv", cfg);
    files.push_back("simulate_monte_carlo.csv");
    if (oracle) {
      emit_csv(*oracle, dir / "simulate_oracle.csv", cfg);
      files.push_back("simulate_oracle.csv");
    }
  }
  summary["files"] = files;

  bool pass = true;
  if (oracle) {
    Tolerances tol = cfg.compare.tolerances;
    // deterministic nodes (zero standard error) must match the oracle tightly
    if (!tol.max_abs && cfg.kernel.sigma_b2 == 0.0) tol.max_abs = 1e-8;
    CurveComparison c = compare_curves(*oracle, mc, tol);
    pass = c.pass;
    summary["oracle"] = to_json(c, false);
    log << "oracle comparison: max_abs " << c.max_abs << ", |z| <= " << tol.z_max << " at " << c.z_fraction * 100
        << "% of " << c.z_nodes << " nodes -> " << (c.pass ? "PASS" : "FAIL") << '\n';
  } else {
    summary["oracle"] = nullptr;
    log << "no exact oracle for this configuration\n";
  }
  summary["pass"] = pass;
  if (cfg.outputs.json) write_json_atomically(dir / "simulate.json", summary);
  return pass ? kSuccess : kCheckFailure;
}

int cmd_closure(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& log) {
  const std::filesystem::path dir = output_dir(cfg, opts);
  Json summary = report_header(cfg, "closure");
  Json curves = Json::array();
  for (ClosureMethod method : cfg.methods) {
    const ClosureProblem prob = cfg.closure_problem(method);
    const std::string stem = std::string("closure_") + to_string(prob.model) + "_" + to_string(method);
    Json entry = {{"model", to_string(prob.model)}, {"method", to_string(method)}};
    try {
      const GreenFunction time = solve_time_domain(prob, cfg.time_grid());
      const bool closed = !prob.kernel.pointwise();
      const std::string time_file = stem + (closed ? "_closed_form.csv" : "_time.csv");
      if (cfg.outputs.csv) emit_csv(time, dir / time_file, cfg);
      entry[closed ? "closed_form" : "time"] = time_file;
      if (cfg.closure.laplace && !closed) {
        const GreenFunction inv = laplace_inverted_green(prob, cfg.time_grid(), {}, cfg.closure.laplace_stride);
        const std::string inv_file = stem + "_laplace.csv";
        if (cfg.outputs.csv) emit_csv(inv, dir / inv_file, cfg);
        entry["laplace"] = inv_file;
        const CurveComparison c = compare_curves(time, inv, {});
        entry["cross_domain_max_abs"] = c.max_abs;
        log << stem << ": time vs laplace max_abs " << c.max_abs << '\n';
      } else {
        log << stem << ": written\n";
      }
    } catch (const std::exception& e) {
      throw NumericalError(stem + ": " + e.what());
    }
    curves.push_back(entry);
  }
  summary["curves"] = curves;
  if (cfg.outputs.json) write_json_atomically(dir / "closure.json", summary);
  return kSuccess;
}

std::vector<GreenFunction> build_curves(const ExperimentConfig& cfg, int threads) {
  std::vector<GreenFunction> out;
  for (std::size_t i = 0; i < cfg.compare.curves.size(); ++i) {
    const CurveSpec& spec = cfg.compare.curves[i];
    GreenFunction g = [&]() -> GreenFunction {
      switch (spec.source) {
        case CurveSource::monte_carlo:
          validate_simulation(cfg);
          return monte_carlo_curve(cfg, threads);
        case CurveSource::oracle: {
          auto o = simulation_oracle(cfg);
          if (!o) throw ConfigError("compare.curves[" + std::to_string(i) + "]", "no oracle for this configuration");
          return *o;
        }
        case CurveSource::file: return read_green_csv(spec.file);
        default: return closure_curve(cfg, spec.source, spec.method);
      }
    }();
    g.label = spec.name;
    out.push_back(std::move(g));
  }
  return out;
}

ComparisonReport compare_against_first(const std::vector<GreenFunction>& curves, const Tolerances& tol) {
  ComparisonReport r;
  r.tolerances = tol;
  for (std::size_t i = 1; i < curves.size(); ++i) {
    r.comparisons.push_back(compare_curves(curves.front(), curves[i], tol));
    r.pass = r.pass && r.comparisons.back().pass;
  }
  return r;
}

int cmd_compare(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& log) {
  if (cfg.compare.curves.size() < 2) throw ConfigError("compare.curves", "at least two curve sources are required");
  const std::vector<GreenFunction> curves = build_curves(cfg, opts.threads);
  ComparisonReport report;
  try {
    report = compare_against_first(curves, cfg.compare.tolerances);
  } catch (const GridMismatch& e) {
    throw ConfigError("compare.curves", e.what());
  }
  for (const auto& c : report.comparisons) {
    log << (c.pass ? "PASS " : "FAIL ") << c.candidate << " vs " << c.reference << ": max_abs " << c.max_abs
        << ", rms " << c.rms << ", z within " << c.z_fraction * 100 << "% of " << c.z_nodes << " nodes\n";
  }
  Json j = report_header(cfg, "compare");
  j["report"] = to_json(report);
  write_json_atomically(output_dir(cfg, opts) / "compare.json", j);
  return report.pass ? kSuccess : kCheckFailure;
}

}  // namespace tsdia::cli
