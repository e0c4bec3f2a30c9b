#pragma once

#include <Eigen/Core>
#include <complex>
#include <filesystem>
#include <optional>
#include <string>

#include "tsdia/gamma_compound.hpp"
#include "tsdia/grid.hpp"
#include "tsdia/kernels.hpp"
#include "tsdia/noise.hpp"

namespace tsdia {

enum class OscillatorModel { markov, non_markov, full_kernel };

const char* to_string(OscillatorModel model);
OscillatorModel oscillator_model_from_string(const std::string& name);

/// Damping of the stochastic oscillator. nu is a rate for markov and a rate squared for
/// non-markov and full-kernel; mu (kernel decay rate) is used by full-kernel only.
struct OscillatorConfig {
  OscillatorModel model = OscillatorModel::markov;
  double nu = 0.0;
  double mu = 0.0;

  void validate() const;
  /// Largest damping rate of the noise-free linear system; enters the step-size rule.
  double effective_rate() const;
};

enum class Provenance { monte_carlo, closure, oracle };

const char* to_string(Provenance p);

/// Green's function on a uniform grid, G(0) = 1.
struct GreenFunction {
  TimeGrid grid;
  Eigen::VectorXcd values;
  std::optional<Eigen::MatrixX2d> std_error;  // columns: re, im
  Provenance provenance = Provenance::oracle;
  std::string label;
};

/// Largest allowed (|b|_max + effective_rate) * dt.
inline constexpr double kMaxStepProduct = 0.1;

/// Integrates one realization on the grid of `b`, with the noise linearly interpolated between nodes.
/// non-markov and full-kernel use a classical RK4 step; memory terms are carried by
/// z(t) = int_0^t Gamma(t - s) G(s) ds. markov uses the exact step factor
/// exp(-nu dt - i dt (b_i + b_{i+1})/2), so |G(t)| = e^{-nu t} up to rounding.
GreenFunction simulate_realization(const NoisePath& b, const OscillatorConfig& cfg);

struct EnsembleOptions {
  int threads = 1;
  /// Realizations per reduction block; fixed so results do not depend on `threads`.
  int block_size = 64;
};

/// Mean of simulate_realization over an ensemble, with per-node standard errors.
/// Bitwise reproducible for a given (master_seed, n_realizations) regardless of threads.
GreenFunction ensemble_mean_green(const EnsembleSpec& spec, const PathSampler& sampler, const OscillatorConfig& cfg,
                                  const EnsembleOptions& options = {});

/// Convenience overload building the sampler from `params`.
GreenFunction ensemble_mean_green(const EnsembleSpec& spec, const NoiseParams& params, const OscillatorConfig& cfg,
                                  const TimeGrid& grid, const EnsembleOptions& options = {});

/// e^{-nu t - sigma_b2 I(t)}: exact ensemble mean of the Markov model for Gaussian noise with
/// the kernel's covariance (tsallis or ou).
GreenFunction exact_markov_mean(const NoiseKernel& k, double nu, const TimeGrid& grid);

/// Exact mean for compound-ou noise: E_lambda[exp(-sigma_b2 (lambda t - 1 + e^{-lambda t}) / lambda^2)] e^{-nu t}.
GreenFunction exact_compound_markov_mean(const GammaParams& g, double sigma_b2, double nu, const TimeGrid& grid);

/// Noise-free solution of the model (cos sqrt(nu) t for non-markov, e^{-nu t} for markov).
GreenFunction noise_free_green(const OscillatorConfig& cfg, const TimeGrid& grid);

/// CSV with `t,re,im,stderr_re,stderr_im` when standard errors are present, `t,re,im` otherwise.
/// `preamble` lines are written first, each prefixed with "# ".
void write_green_csv(const GreenFunction& g, const std::filesystem::path& file,
                     const std::vector<std::string>& preamble = {});

GreenFunction read_green_csv(const std::filesystem::path& file);

}  // namespace tsdia
