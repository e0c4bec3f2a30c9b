#include "tsdia/noise.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <sstream>

namespace tsdia {

const char* to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::ou: return "ou";
    case SamplerKind::compound_ou: return "compound-ou";
    case SamplerKind::gaussian_qexp: return "gaussian-qexp";
  }
  return "?";
}

SamplerKind sampler_kind_from_string(const std::string& name) {
  if (name == "ou") return SamplerKind::ou;
  if (name == "compound-ou") return SamplerKind::compound_ou;
  if (name == "gaussian-qexp") return SamplerKind::gaussian_qexp;
  throw DomainError("unknown sampler '" + name + "'");
}

void EnsembleSpec::validate() const {
  if (n_realizations < 2) throw DomainError("an ensemble needs at least 2 realizations");
}

NoisePath ou_path(RandomStream& rng, double lambda, double sigma_b2, const TimeGrid& grid) {
  if (!(lambda > 0.0)) throw DomainError("ou_path requires lambda > 0");
  if (!(sigma_b2 >= 0.0)) throw DomainError("ou_path requires sigma_b2 >= 0");
  const double sigma = std::sqrt(sigma_b2);
  const double decay = std::exp(-lambda * grid.dt());
  const double kick = sigma * std::sqrt(-std::expm1(-2.0 * lambda * grid.dt()));
  NoisePath path{grid, Eigen::VectorXd(grid.size()), {SamplerKind::ou, sigma_b2, lambda, 1.0}};
  path.values[0] = sigma * rng.normal();
  for (int i = 1; i < grid.size(); ++i) path.values[i] = decay * path.values[i - 1] + kick * rng.normal();
  return path;
}

NoisePath compound_ou_path(RandomStream& rng, const GammaParams& g, double sigma_b2, const TimeGrid& grid) {
  double lambda = sample_rate(rng, g);
  // A draw of exactly zero (possible only through underflow for tiny shapes) means frozen noise.
  lambda = std::max(lambda, std::numeric_limits<double>::min());
  NoisePath path = ou_path(rng, lambda, sigma_b2, grid);
  path.meta.sampler = SamplerKind::compound_ou;
  path.meta.q = 1.0 + 1.0 / g.shape();
  return path;
}

namespace {

std::string describe(const NoiseKernel& k, const TimeGrid& grid) {
  std::ostringstream os;
  os << "q = " << k.q().q() << ", lambda0 = " << k.lambda0() << ", grid dt = " << grid.dt() << " n = "
     << grid.steps();
  return os.str();
}

Eigen::MatrixXd covariance_matrix(const NoiseKernel& k, const TimeGrid& grid) {
  const int m = grid.size();
  Eigen::VectorXd row(m);
  for (int i = 0; i < m; ++i) row[i] = k(grid.node(i));
  Eigen::MatrixXd c(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) c(i, j) = row[std::abs(i - j)];
  return c;
}

}  // namespace

CovarianceFactor factor_qexp_covariance(const NoiseKernel& k, const TimeGrid& grid, bool allow_subunit_q) {
  if (k.kind() != KernelKind::tsallis && k.kind() != KernelKind::ou)
    throw DomainError("gaussian-qexp sampling needs a tsallis or ou kernel");
  if (k.kind() == KernelKind::tsallis && k.q().q() < 1.0 && !allow_subunit_q)
    throw DomainError("q < 1 kernels are not guaranteed positive semidefinite; enable allow_subunit_q (" +
                      describe(k, grid) + ")");
  if (grid.size() > kMaxGaussianGridNodes) throw DomainError("grid too large for dense factorization");

  const Eigen::MatrixXd c = covariance_matrix(k, grid);
  const double s2 = k.sigma_b2();
  CovarianceFactor out;

  for (double jitter = 0.0; jitter <= 1e-8 * s2 * (1.0 + 1e-12);
       jitter = (jitter == 0.0) ? 1e-12 * s2 : 2.0 * jitter) {
    Eigen::MatrixXd cj = c;
    cj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(cj);
    if (llt.info() == Eigen::Success) {
      out.factor = llt.matrixL();
      out.jitter = jitter;
      break;
    }
    ++out.warnings;
  }

  if (out.factor.size() == 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed (" + describe(k, grid) + ")");
    const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    out.factor = es.eigenvectors() * clipped.cwiseSqrt().asDiagonal();
    out.eigen_fallback = true;
    ++out.warnings;
  }

  out.residual = (c - out.factor * out.factor.transpose()).cwiseAbs().maxCoeff();
  if (out.residual > 1e-8 * s2 * (1.0 + 1e-9)) {
    std::ostringstream os;
    os << "covariance factorization residual " << out.residual << " exceeds 1e-8 sigma_b2 (" << describe(k, grid)
       << ")";
    throw NumericalError(os.str());
  }
  return out;
}

NoisePath gaussian_qexp_path(RandomStream& rng, const NoiseKernel& k, const TimeGrid& grid, bool allow_subunit_q) {
  return GaussianQexpSampler(k, grid, allow_subunit_q).sample(rng);
}

NoiseKernel NoiseParams::kernel() const { return NoiseKernel::tsallis(sigma_b2, lambda0, QIndex(q)); }

OuSampler::OuSampler(double lambda, double sigma_b2, const TimeGrid& grid)
    : PathSampler(grid), lambda_(lambda), sigma_b2_(sigma_b2) {
  if (!(lambda > 0.0)) throw DomainError("ou sampler requires lambda > 0");
}

NoisePath OuSampler::sample(RandomStream& rng) const { return ou_path(rng, lambda_, sigma_b2_, grid_); }

CompoundOuSampler::CompoundOuSampler(const GammaParams& g, double sigma_b2, const TimeGrid& grid)
    : PathSampler(grid), rates_(g), sigma_b2_(sigma_b2) {}

NoisePath CompoundOuSampler::sample(RandomStream& rng) const {
  return compound_ou_path(rng, rates_, sigma_b2_, grid_);
}

GaussianQexpSampler::GaussianQexpSampler(const NoiseKernel& k, const TimeGrid& grid, bool allow_subunit_q)
    : PathSampler(grid), kernel_(k), factor_(factor_qexp_covariance(k, grid, allow_subunit_q)) {}

NoisePath GaussianQexpSampler::sample(RandomStream& rng) const {
  const int m = grid_.size();
  Eigen::VectorXd xi(m);
  for (int i = 0; i < m; ++i) xi[i] = rng.normal();
  NoisePath path{grid_, Eigen::VectorXd(m), {SamplerKind::gaussian_qexp, kernel_.sigma_b2(), kernel_.lambda0(),
                                            kernel_.q().q()}};
  if (factor_.eigen_fallback)
    path.values.noalias() = factor_.factor * xi;
  else
    path.values.noalias() = factor_.factor.triangularView<Eigen::Lower>() * xi;
  return path;
}

std::unique_ptr<PathSampler> make_sampler(SamplerKind kind, const NoiseParams& params, const TimeGrid& grid) {
  switch (kind) {
    case SamplerKind::ou: return std::make_unique<OuSampler>(params.lambda0, params.sigma_b2, grid);
    case SamplerKind::compound_ou:
      return std::make_unique<CompoundOuSampler>(params_from_tsallis(params.lambda0, QIndex(params.q)),
                                                 params.sigma_b2, grid);
    case SamplerKind::gaussian_qexp:
      return std::make_unique<GaussianQexpSampler>(params.kernel(), grid, params.allow_subunit_q);
  }
  throw DomainError("unknown sampler");
}

std::vector<AutocorrEstimate> empirical_autocorr(const std::vector<NoisePath>& paths, int max_lag, int origin) {
  if (paths.size() < 2) throw DomainError("empirical_autocorr needs at least 2 paths");
  const TimeGrid& grid = paths.front().grid;
  for (const auto& p : paths) {
    if (!(p.grid == grid) || p.values.size() != grid.size())
      throw DomainError("empirical_autocorr: paths do not share a grid");
  }
  if (origin < 0 || max_lag < 0 || origin + max_lag > grid.steps())
    throw DomainError("empirical_autocorr: lag range exceeds the grid");

  const auto n = static_cast<double>(paths.size());
  std::vector<AutocorrEstimate> out;
  out.reserve(max_lag + 1);
  for (int lag = 0; lag <= max_lag; ++lag) {
    double sx = 0.0, sy = 0.0, sxy = 0.0;
    for (const auto& p : paths) {
      const double x = p.values[origin], y = p.values[origin + lag];
      sx += x;
      sy += y;
      sxy += x * y;
    }
    const double cov = (sxy - sx * sy / n) / (n - 1.0);
    // Delete-one jackknife of the unbiased covariance.
    double mean_loo = 0.0;
    std::vector<double> loo(paths.size());
    for (std::size_t r = 0; r < paths.size(); ++r) {
      const double x = paths[r].values[origin], y = paths[r].values[origin + lag];
      const double m = n - 1.0;
      loo[r] = ((sxy - x * y) - (sx - x) * (sy - y) / m) / (m - 1.0);
      mean_loo += loo[r];
    }
    mean_loo /= n;
    double ss = 0.0;
    for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
    const double se = paths.size() < 3 ? std::numeric_limits<double>::infinity() : std::sqrt((n - 1.0) / n * ss);
    out.push_back({lag, lag * grid.dt(), cov, se});
  }
  return out;
}

void write_path_csv(const NoisePath& path, const std::filesystem::path& file) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os.precision(17);
  os << "t,b\n";
  for (int i = 0; i < path.grid.size(); ++i) os << path.grid.node(i) << ',' << path.values[i] << '\n';
}

}  // namespace tsdia
