#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tsdia/gamma_compound.hpp"
#include "tsdia/grid.hpp"
#include "tsdia/kernels.hpp"
#include "tsdia/random.hpp"

namespace tsdia {

enum class SamplerKind { ou, compound_ou, gaussian_qexp };

const char* to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(const std::string& name);

struct NoiseMeta {
  SamplerKind sampler = SamplerKind::ou;
  double sigma_b2 = 0.0;
  double lambda = 0.0;  // rate used for this realization (drawn for compound-ou)
  double q = 1.0;
};

/// One realization b(t_i), i = 0..n.
struct NoisePath {
  TimeGrid grid;
  Eigen::VectorXd values;
  NoiseMeta meta;
};

struct EnsembleSpec {
  int n_realizations = 2;
  std::uint64_t master_seed = 0;
  SamplerKind sampler = SamplerKind::ou;

  void validate() const;
};

/// Exact OU discretization b_{i+1} = b_i e^{-lambda dt} + sigma_b sqrt(1 - e^{-2 lambda dt}) xi_i.
NoisePath ou_path(RandomStream& rng, double lambda, double sigma_b2, const TimeGrid& grid);

/// Draws lambda from the gamma law once, then an exact OU path with that rate.
NoisePath compound_ou_path(RandomStream& rng, const GammaParams& g, double sigma_b2, const TimeGrid& grid);

/// Cholesky-type factor F with C ~= F F^T for C_ij = k(|t_i - t_j|).
struct CovarianceFactor {
  Eigen::MatrixXd factor;
  double jitter = 0.0;          // diagonal regularization that was added
  int warnings = 0;             // jitter escalations plus eigen-clipping fallback
  bool eigen_fallback = false;
  double residual = 0.0;        // max |C - F F^T|
};

/// Factorizes the q-exponential covariance on `grid`: LLT with jitter escalation
/// (1e-12 sigma_b2 doubling up to 1e-8 sigma_b2), then eigendecomposition with clipping.
/// q < 1 requires allow_subunit_q. Throws NumericalError naming q, lambda0 and the grid on failure.
CovarianceFactor factor_qexp_covariance(const NoiseKernel& k, const TimeGrid& grid, bool allow_subunit_q = false);

inline constexpr int kMaxGaussianGridNodes = 8192;

/// Gaussian path with exact q-exponential covariance at grid resolution. Factorizes on every call;
/// use GaussianQexpSampler for ensembles.
NoisePath gaussian_qexp_path(RandomStream& rng, const NoiseKernel& k, const TimeGrid& grid,
                             bool allow_subunit_q = false);

/// Noise parameters shared by all samplers. compound-ou maps (lambda0, q) to gamma
/// parameters via c = 1/(q-1), a = lambda0 / c.
struct NoiseParams {
  double sigma_b2 = 1.0;
  double lambda0 = 1.0;
  double q = 1.0;
  bool allow_subunit_q = false;

  NoiseKernel kernel() const;
};

class PathSampler {
 public:
  virtual ~PathSampler() = default;
  virtual NoisePath sample(RandomStream& rng) const = 0;
  virtual SamplerKind kind() const = 0;
  const TimeGrid& grid() const { return grid_; }

 protected:
  explicit PathSampler(const TimeGrid& grid) : grid_(grid) {}
  TimeGrid grid_;
};

class OuSampler final : public PathSampler {
 public:
  OuSampler(double lambda, double sigma_b2, const TimeGrid& grid);
  NoisePath sample(RandomStream& rng) const override;
  SamplerKind kind() const override { return SamplerKind::ou; }

 private:
  double lambda_;
  double sigma_b2_;
};

class CompoundOuSampler final : public PathSampler {
 public:
  CompoundOuSampler(const GammaParams& g, double sigma_b2, const TimeGrid& grid);
  NoisePath sample(RandomStream& rng) const override;
  SamplerKind kind() const override { return SamplerKind::compound_ou; }
  const GammaParams& rates() const { return rates_; }

 private:
  GammaParams rates_;
  double sigma_b2_;
};

class GaussianQexpSampler final : public PathSampler {
 public:
  GaussianQexpSampler(const NoiseKernel& k, const TimeGrid& grid, bool allow_subunit_q = false);
  NoisePath sample(RandomStream& rng) const override;
  SamplerKind kind() const override { return SamplerKind::gaussian_qexp; }
  const CovarianceFactor& covariance() const { return factor_; }

 private:
  NoiseKernel kernel_;
  CovarianceFactor factor_;
};

std::unique_ptr<PathSampler> make_sampler(SamplerKind kind, const NoiseParams& params, const TimeGrid& grid);

struct AutocorrEstimate {
  int lag;
  double tau;
  double estimate;
  double std_error;
};

/// Across-realization covariance of (b(t_origin), b(t_origin + lag dt)) for lag = 0..max_lag,
/// with delete-one jackknife standard errors. Throws DomainError on grid mismatch.
std::vector<AutocorrEstimate> empirical_autocorr(const std::vector<NoisePath>& paths, int max_lag, int origin = 0);

/// Writes `t,b` CSV.
void write_path_csv(const NoisePath& path, const std::filesystem::path& file);

}  // namespace tsdia
