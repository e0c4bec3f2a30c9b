#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "tsdia/cli/config.hpp"
#include "tsdia/cli/report.hpp"

namespace tsdia::cli {

enum ExitCode : int { kSuccess = 0, kCheckFailure = 1, kConfigError = 2 };

struct CommandOptions {
  std::optional<std::filesystem::path> out;  // overrides outputs.directory
  std::optional<std::uint64_t> seed;         // overrides ensemble.master_seed
  int threads = 1;
};

/// Loads a config file and applies the command-line overrides.
ExperimentConfig resolve_config(const std::filesystem::path& file, const CommandOptions& opts);

int cmd_verify(const std::string& suite, const CommandOptions& opts, std::ostream& log);
int cmd_simulate(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& log);
int cmd_closure(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& log);
int cmd_compare(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& log);

/// Oracle matching the simulate configuration, when one exists.
std::optional<GreenFunction> simulation_oracle(const ExperimentConfig& cfg);

/// Builds the curves declared in compare.curves.
std::vector<GreenFunction> build_curves(const ExperimentConfig& cfg, int threads);

ComparisonReport compare_against_first(const std::vector<GreenFunction>& curves, const Tolerances& tol);

}  // namespace tsdia::cli
