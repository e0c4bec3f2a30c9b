#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "tsdia/closures.hpp"
#include "tsdia/kernels.hpp"
#include "tsdia/noise.hpp"
#include "tsdia/oscillator.hpp"

namespace tsdia::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct KernelSection {
  KernelKind kind = KernelKind::tsallis;
  double q = 1.0;
  double lambda0 = 1.0;
  double sigma_b2 = 1.0;
  bool allow_subunit_q = false;
};

struct GridSection {
  double dt = 0.01;
  double t_max = 5.0;
};

struct EnsembleSection {
  int n_realizations = 1000;
  std::uint64_t master_seed = 1;
  SamplerKind sampler = SamplerKind::gaussian_qexp;
};

struct ClosureSection {
  bool laplace = true;
  int laplace_stride = 10;
};

enum class CurveSource { monte_carlo, oracle, volterra, laplace, closed_form, file };

const char* to_string(CurveSource s);

struct CurveSpec {
  std::string name;
  CurveSource source = CurveSource::oracle;
  ClosureMethod method = ClosureMethod::perturbative;
  std::string file;
};

struct Tolerances {
  std::optional<double> max_abs;
  std::optional<double> rms;
  double z_max = 3.0;
  double z_fraction = 0.99;
};

struct CompareSection {
  std::vector<CurveSpec> curves;
  Tolerances tolerances;
};

struct OutputSection {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
};

struct ExperimentConfig {
  OscillatorModel model = OscillatorModel::markov;
  std::vector<ClosureMethod> methods{ClosureMethod::perturbative, ClosureMethod::dia};
  KernelSection kernel;
  OscillatorConfig oscillator;
  GridSection grid;
  EnsembleSection ensemble;
  ClosureSection closure;
  CompareSection compare;
  OutputSection outputs;

  TimeGrid time_grid() const;
  NoiseParams noise_params() const;
  /// Kernel for the closure solvers and oracles; requires sigma_b2 > 0.
  NoiseKernel noise_kernel() const;
  ClosureProblem closure_problem(ClosureMethod method) const;
};

/// Parses and validates. Unknown keys and invalid values raise ConfigError with the key path.
ExperimentConfig parse_config(const Json& j);

/// Reads a config file. Accepts a plain config, a JSON report embedding "config", or a CSV whose
/// "# config: " preamble line holds the config.
ExperimentConfig load_config(const std::filesystem::path& file);

/// Sampler-specific constraints. parse_config applies them when an "ensemble" section is present.
void validate_simulation(const ExperimentConfig& cfg);

/// Fully resolved config, defaults included.
Json to_json(const ExperimentConfig& cfg);

/// "# "-prefixed provenance lines for CSV artifacts (without the "# ").
std::vector<std::string> csv_preamble(const ExperimentConfig& cfg);

}  // namespace tsdia::cli
