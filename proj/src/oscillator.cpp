#include "tsdia/oscillator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <mutex>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace tsdia {

using cd = std::complex<double>;

const char* to_string(OscillatorModel model) {
  switch (model) {
    case OscillatorModel::markov: return "markov";
    case OscillatorModel::non_markov: return "non-markov";
    case OscillatorModel::full_kernel: return "full-kernel";
  }
  return "?";
}

OscillatorModel oscillator_model_from_string(const std::string& name) {
  if (name == "markov") return OscillatorModel::markov;
  if (name == "non-markov") return OscillatorModel::non_markov;
  if (name == "full-kernel") return OscillatorModel::full_kernel;
  throw DomainError("unknown oscillator model '" + name + "'");
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::monte_carlo: return "monte-carlo";
    case Provenance::closure: return "closure";
    case Provenance::oracle: return "oracle";
  }
  return "?";
}

void OscillatorConfig::validate() const {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("oscillator nu must be finite and >= 0");
  if (model == OscillatorModel::full_kernel && !(mu > 0.0))
    throw DomainError("full-kernel model needs mu > 0");
}

double OscillatorConfig::effective_rate() const {
  switch (model) {
    case OscillatorModel::markov: return nu;
    case OscillatorModel::non_markov: return std::sqrt(nu);
    case OscillatorModel::full_kernel: {
      // Largest |root| of p^2 + mu p + nu.
      const double disc = mu * mu - 4.0 * nu;
      return disc >= 0.0 ? 0.5 * (mu + std::sqrt(disc)) : std::sqrt(nu);
    }
  }
  return nu;
}

namespace {

struct State {
  cd g;
  cd z;
};

State rhs(const OscillatorConfig& cfg, double b, const State& s) {
  const cd ib(0.0, b);
  switch (cfg.model) {
    case OscillatorModel::markov: return {-(cfg.nu + ib) * s.g, 0.0};
    case OscillatorModel::non_markov: return {-ib * s.g - s.z, cfg.nu * s.g};
    case OscillatorModel::full_kernel: return {-ib * s.g - s.z, -cfg.mu * s.z + cfg.nu * s.g};
  }
  return {};
}

State axpy(const State& s, double h, const State& k) { return {s.g + h * k.g, s.z + h * k.z}; }

}  // namespace

GreenFunction simulate_realization(const NoisePath& b, const OscillatorConfig& cfg) {
  cfg.validate();
  const TimeGrid& grid = b.grid;
  const double dt = grid.dt();
  const double bmax = b.values.cwiseAbs().maxCoeff();
  if ((bmax + cfg.effective_rate()) * dt > kMaxStepProduct) {
    std::ostringstream os;
    os << "step-size violation: (|b|_max + rate) * dt = " << (bmax + cfg.effective_rate()) * dt << " > "
       << kMaxStepProduct << " (|b|_max = " << bmax << ", rate = " << cfg.effective_rate() << ", dt = " << dt << ")";
    throw DomainError(os.str());
  }

  GreenFunction out{grid, Eigen::VectorXcd(grid.size()), std::nullopt, Provenance::monte_carlo, "realization"};
  State s{1.0, 0.0};
  out.values[0] = s.g;
  for (int i = 0; i < grid.steps(); ++i) {
    const double b0 = b.values[i];
    const double b1 = b.values[i + 1];
    const double bm = 0.5 * (b0 + b1);
    if (cfg.model == OscillatorModel::markov) {
      // exact propagator of the scalar equation with linearly interpolated noise
      s.g *= std::exp(std::complex<double>(-cfg.nu * dt, -bm * dt));
      out.values[i + 1] = s.g;
      continue;
    }
    const State k1 = rhs(cfg, b0, s);
    const State k2 = rhs(cfg, bm, axpy(s, 0.5 * dt, k1));
    const State k3 = rhs(cfg, bm, axpy(s, 0.5 * dt, k2));
    const State k4 = rhs(cfg, b1, axpy(s, dt, k3));
    s.g += dt / 6.0 * (k1.g + 2.0 * k2.g + 2.0 * k3.g + k4.g);
    s.z += dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
    out.values[i + 1] = s.g;
  }
  return out;
}

namespace {

// Per-node sums of re, im, re^2, im^2.
struct Moments {
  Eigen::ArrayX4d sums;
  int count = 0;
};

Moments block_moments(const EnsembleSpec& spec, const PathSampler& sampler, const OscillatorConfig& cfg, int first,
                      int last) {
  Moments m{Eigen::ArrayX4d::Zero(sampler.grid().size(), 4), 0};
  for (int r = first; r < last; ++r) {
    RandomStream rng = RandomStream::for_realization(spec.master_seed, static_cast<std::uint64_t>(r));
    const GreenFunction g = simulate_realization(sampler.sample(rng), cfg);
    const Eigen::ArrayXd re = g.values.real().array();
    const Eigen::ArrayXd im = g.values.imag().array();
    m.sums.col(0) += re;
    m.sums.col(1) += im;
    m.sums.col(2) += re.square();
    m.sums.col(3) += im.square();
    ++m.count;
  }
  return m;
}

Moments pairwise_sum(std::vector<Moments>& blocks, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return std::move(blocks[lo]);
  const std::size_t mid = lo + (hi - lo) / 2;
  Moments left = pairwise_sum(blocks, lo, mid);
  const Moments right = pairwise_sum(blocks, mid, hi);
  left.sums += right.sums;
  left.count += right.count;
  return left;
}

}  // namespace

GreenFunction ensemble_mean_green(const EnsembleSpec& spec, const PathSampler& sampler, const OscillatorConfig& cfg,
                                  const EnsembleOptions& options) {
  spec.validate();
  cfg.validate();
  if (options.block_size < 1) throw DomainError("ensemble block size must be positive");
  const int n = spec.n_realizations;
  const int nblocks = (n + options.block_size - 1) / options.block_size;
  std::vector<Moments> blocks(nblocks);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int b = next++; b < nblocks; b = next++) {
      try {
        blocks[b] = block_moments(spec, sampler, cfg, b * options.block_size,
                                  std::min(n, (b + 1) * options.block_size));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = nblocks;
      }
    }
  };
  const int threads = std::clamp(options.threads, 1, nblocks);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const Moments total = pairwise_sum(blocks, 0, blocks.size());
  const double cnt = total.count;
  const Eigen::ArrayXd mean_re = total.sums.col(0) / cnt;
  const Eigen::ArrayXd mean_im = total.sums.col(1) / cnt;
  Eigen::MatrixX2d se(sampler.grid().size(), 2);
  se.col(0) = ((total.sums.col(2) - cnt * mean_re.square()) / (cnt - 1.0)).max(0.0).sqrt().matrix() / std::sqrt(cnt);
  se.col(1) = ((total.sums.col(3) - cnt * mean_im.square()) / (cnt - 1.0)).max(0.0).sqrt().matrix() / std::sqrt(cnt);

  GreenFunction out{sampler.grid(), Eigen::VectorXcd(sampler.grid().size()), se, Provenance::monte_carlo,
                    std::string("monte-carlo/") + to_string(sampler.kind())};
  out.values.real() = mean_re.matrix();
  out.values.imag() = mean_im.matrix();
  return out;
}

GreenFunction ensemble_mean_green(const EnsembleSpec& spec, const NoiseParams& params, const OscillatorConfig& cfg,
                                  const TimeGrid& grid, const EnsembleOptions& options) {
  const auto sampler = make_sampler(spec.sampler, params, grid);
  return ensemble_mean_green(spec, *sampler, cfg, options);
}

GreenFunction exact_markov_mean(const NoiseKernel& k, double nu, const TimeGrid& grid) {
  if (k.kind() != KernelKind::tsallis && k.kind() != KernelKind::ou)
    throw DomainError("exact_markov_mean needs a tsallis or ou kernel");
  const QIndex q = k.kind() == KernelKind::ou ? QIndex(1.0) : k.q();
  GreenFunction out{grid, Eigen::VectorXcd(grid.size()), std::nullopt, Provenance::oracle, "exact-markov"};
  for (int i = 0; i < grid.size(); ++i) {
    const double t = grid.node(i);
    out.values[i] = std::exp(-nu * t - k.sigma_b2() * iq_closed_form(t, q, k.lambda0()));
  }
  out.values[0] = 1.0;
  return out;
}

GreenFunction exact_compound_markov_mean(const GammaParams& g, double sigma_b2, double nu, const TimeGrid& grid) {
  GreenFunction out{grid, Eigen::VectorXcd(grid.size()), std::nullopt, Provenance::oracle, "exact-compound-markov"};
  out.values[0] = 1.0;
  for (int i = 1; i < grid.size(); ++i) {
    const double t = grid.node(i);
    const double avg = gamma_expectation(
        [&](double lambda) { return std::exp(-sigma_b2 * ou_phase_integral(lambda, t)); }, g, 1e-12);
    out.values[i] = avg * std::exp(-nu * t);
  }
  return out;
}

GreenFunction noise_free_green(const OscillatorConfig& cfg, const TimeGrid& grid) {
  cfg.validate();
  GreenFunction out{grid, Eigen::VectorXcd(grid.size()), std::nullopt, Provenance::oracle, "noise-free"};
  for (int i = 0; i < grid.size(); ++i) {
    const double t = grid.node(i);
    switch (cfg.model) {
      case OscillatorModel::markov: out.values[i] = std::exp(-cfg.nu * t); break;
      case OscillatorModel::non_markov: out.values[i] = std::cos(std::sqrt(cfg.nu) * t); break;
      case OscillatorModel::full_kernel: {
        // G'' + mu G' + nu G = 0, G(0) = 1, G'(0) = 0.
        const cd disc = std::sqrt(cd(cfg.mu * cfg.mu - 4.0 * cfg.nu));
        const cd r1 = 0.5 * (-cfg.mu + disc), r2 = 0.5 * (-cfg.mu - disc);
        if (std::abs(r1 - r2) < 1e-12 * std::max(1.0, cfg.mu))
          out.values[i] = std::exp(r1 * t) * (1.0 - r1 * t);
        else
          out.values[i] = (r2 * std::exp(r1 * t) - r1 * std::exp(r2 * t)) / (r2 - r1);
        break;
      }
    }
  }
  out.values[0] = 1.0;
  return out;
}

void write_green_csv(const GreenFunction& g, const std::filesystem::path& file,
                     const std::vector<std::string>& preamble) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os.precision(17);
  for (const auto& line : preamble) os << "# " << line << '\n';
  os << (g.std_error ? "t,re,im,stderr_re,stderr_im\n" : "t,re,im\n");
  for (int i = 0; i < g.grid.size(); ++i) {
    os << g.grid.node(i) << ',' << g.values[i].real() << ',' << g.values[i].imag();
    if (g.std_error) os << ',' << (*g.std_error)(i, 0) << ',' << (*g.std_error)(i, 1);
    os << '\n';
  }
  if (!os) throw std::runtime_error("failed writing " + file.string());
}

GreenFunction read_green_csv(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot read " + file.string());
  std::string line;
  std::vector<std::array<double, 5>> rows;
  bool with_se = false;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line == "t,re,im,stderr_re,stderr_im") with_se = true;
      else if (line != "t,re,im") throw std::runtime_error(file.string() + ": unexpected header '" + line + "'");
      header = true;
      continue;
    }
    std::array<double, 5> r{};
    std::istringstream ls(line);
    std::string cell;
    int col = 0;
    while (std::getline(ls, cell, ',') && col < 5) r[col++] = std::stod(cell);
    if (col != (with_se ? 5 : 3)) throw std::runtime_error(file.string() + ": malformed row '" + line + "'");
    rows.push_back(r);
  }
  if (rows.size() < 2) throw std::runtime_error(file.string() + ": need at least two rows");
  const double dt = rows[1][0] - rows[0][0];
  const TimeGrid grid(dt, static_cast<int>(rows.size()) - 1);
  GreenFunction g{grid, Eigen::VectorXcd(grid.size()), std::nullopt, Provenance::oracle, file.stem().string()};
  if (with_se) g.std_error = Eigen::MatrixX2d(grid.size(), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    g.values[i] = cd(rows[i][1], rows[i][2]);
    if (with_se) (*g.std_error).row(i) << rows[i][3], rows[i][4];
  }
  return g;
}

}  // namespace tsdia
