#include <CLI11.hpp>
#include <iostream>

#include "tsdia/cli/commands.hpp"
#include "tsdia/cli/verify.hpp"
#include "tsdia/errors.hpp"

using namespace tsdia;
using namespace tsdia::cli;

int main(int argc, char** argv) {
  CLI::App app{"Stochastic oscillator with q-exponential noise: simulation, closures and checks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out;
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--out", out, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 1024));

  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(verify_suites()));

  std::string config;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble mean and oracle");
  auto* closure = app.add_subcommand("closure", "Perturbative and DIA closure curves");
  auto* compare = app.add_subcommand("compare", "Compare configured curves");
  for (auto* sub : {simulate, closure, compare})
    sub->add_option("config", config, "Config JSON (or a report/CSV embedding one)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  CommandOptions opts;
  if (!out.empty()) opts.out = out;
  if (*seed_opt) opts.seed = seed;
  opts.threads = threads;

  try {
    if (*verify) return cmd_verify(suite, opts, std::cout);
    const ExperimentConfig cfg = resolve_config(config, opts);
    if (*simulate) return cmd_simulate(cfg, opts, std::cout);
    if (*closure) return cmd_closure(cfg, opts, std::cout);
    return cmd_compare(cfg, opts, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailure;
  }
}
