#include "tsdia/kernels.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "tsdia/quadrature.hpp"

namespace tsdia {

const char* to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::ou: return "ou";
    case KernelKind::tsallis: return "tsallis";
    case KernelKind::linear_small_lambda: return "linear-small-lambda";
    case KernelKind::white: return "white";
  }
  return "?";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "ou") return KernelKind::ou;
  if (name == "tsallis") return KernelKind::tsallis;
  if (name == "linear-small-lambda") return KernelKind::linear_small_lambda;
  if (name == "white") return KernelKind::white;
  throw DomainError("unknown kernel kind '" + name + "'");
}

NoiseKernel::NoiseKernel(KernelKind kind, double sigma_b2, double lambda0, QIndex q)
    : kind_(kind), sigma_b2_(sigma_b2), lambda0_(lambda0), q_(q) {
  if (!(sigma_b2 > 0.0) || !std::isfinite(sigma_b2)) throw DomainError("kernel variance sigma_b2 must be positive");
  if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) throw DomainError("kernel rate lambda0 must be finite and >= 0");
  if (kind == KernelKind::white && !(lambda0 > 0.0)) throw DomainError("white kernel needs lambda0 > 0");
}

NoiseKernel NoiseKernel::ou(double sigma_b2, double lambda0) {
  return NoiseKernel(KernelKind::ou, sigma_b2, lambda0, QIndex(1.0));
}

NoiseKernel NoiseKernel::tsallis(double sigma_b2, double lambda0, QIndex q) {
  return NoiseKernel(KernelKind::tsallis, sigma_b2, lambda0, q);
}

NoiseKernel NoiseKernel::linear_small_lambda(double sigma_b2, double lambda0) {
  return NoiseKernel(KernelKind::linear_small_lambda, sigma_b2, lambda0, QIndex(1.0));
}

NoiseKernel NoiseKernel::white(double sigma_b2, double lambda0) {
  return NoiseKernel(KernelKind::white, sigma_b2, lambda0, QIndex(1.0));
}

double NoiseKernel::shape(double tau) const {
  const double x = lambda0_ * std::abs(tau);
  switch (kind_) {
    case KernelKind::ou: return std::exp(-x);
    case KernelKind::tsallis: return q_exp(-x, q_);
    case KernelKind::linear_small_lambda: return x < 1.0 ? 1.0 - x : 0.0;
    case KernelKind::white: break;
  }
  throw DomainError("white-noise kernel is distributional; use white_noise_weight");
}

double NoiseKernel::operator()(double tau) const { return sigma_b2_ * shape(tau); }

double NoiseKernel::support_end() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (lambda0_ == 0.0) return inf;
  switch (kind_) {
    case KernelKind::linear_small_lambda: return 1.0 / lambda0_;
    case KernelKind::tsallis:
      return (!q_.extensive() && q_.ell() > 0.0) ? 1.0 / (lambda0_ * q_.ell()) : inf;
    default: return inf;
  }
}

double eval_kernel(const NoiseKernel& k, double tau) { return k(tau); }

double white_noise_weight(const NoiseKernel& k) {
  if (!(k.lambda0() > 0.0)) throw DomainError("white_noise_weight needs lambda0 > 0");
  return k.sigma_b2() / k.lambda0();
}

double white_noise_weight_normalization(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("white_noise_weight_normalization needs lambda > 0");
  return integrate_to_infinity([lambda](double t) { return lambda * std::exp(-lambda * t); }, 0.0, 1e-12).value;
}

double ou_phase_integral(double lambda, double t) {
  const double x = lambda * t;
  if (x < 0.1) {
    // t^2 sum_j (-x)^j / (j+2)!
    double term = 0.5, sum = 0.5;
    for (int j = 1; j < 30 && std::abs(term) > 1e-18 * sum; ++j) {
      term *= -x / (j + 2);
      sum += term;
    }
    return t * t * sum;
  }
  return (std::expm1(-x) + x) / (lambda * lambda);
}

namespace {

bool near_singular_q(double q) {
  return std::abs(q - 1.5) < kIqSingularWindow || std::abs(q - 2.0) < kIqSingularWindow;
}

// t^2 sum_k c_k (-x)^k / ((k+2)!) with c_{k+1} = c_k (1 - k ell); converges for x |ell| < 1.
double iq_series(double t, double x, double ell) {
  double coeff = 1.0, power = 1.0, fact = 2.0, sum = 0.5;
  for (int k = 1; k < 60; ++k) {
    coeff *= (k == 1) ? 1.0 : (1.0 - (k - 1) * ell);
    power *= -x;
    fact *= (k + 2);
    const double term = coeff * power / fact;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return t * t * sum;
}

}  // namespace

double iq_closed_form(double t, const QIndex& q, double lambda0) {
  if (!(t >= 0.0)) throw DomainError("I_q(t) requires t >= 0");
  if (!(lambda0 >= 0.0)) throw DomainError("I_q(t) requires lambda0 >= 0");
  if (t == 0.0) return 0.0;
  if (lambda0 == 0.0) return 0.5 * t * t;
  if (q.extensive()) return ou_phase_integral(lambda0, t);
  const double ell = q.ell();
  const double x = lambda0 * t;
  if (x * std::abs(ell) < 0.5 && x < 0.05) return iq_series(t, x, ell);
  if (near_singular_q(q.q())) return iq_quadrature(t, NoiseKernel::tsallis(1.0, lambda0, q));

  const double base = 1.0 - x * ell;
  const double bm1 = base > 0.0 ? std::expm1((1.0 / ell + 2.0) * std::log1p(-x * ell)) : -1.0;
  const double l2 = lambda0 * lambda0;
  return t / (lambda0 * (1.0 + ell)) + bm1 / (l2 * (1.0 + ell) * (1.0 + 2.0 * ell));
}

double iq_quadrature(double t, const NoiseKernel& kernel) {
  if (!(t >= 0.0)) throw DomainError("I(t) requires t >= 0");
  if (!kernel.pointwise()) throw DomainError("iq_quadrature needs a pointwise kernel");
  if (t == 0.0) return 0.0;
  const double upper = std::min(t, kernel.support_end());
  const auto f = [&](double tau) { return (t - tau) * kernel.shape(tau); };
  return integrate(f, 0.0, upper, 1e-10, 1e-14).value;
}

MonotonicityReport iq_property_scan(ScanParameter parameter, const std::vector<double>& grid, double fixed_other,
                                    const std::vector<double>& times) {
  MonotonicityReport rep{parameter, grid, times, Eigen::MatrixXd(times.size(), grid.size()),
                         parameter == ScanParameter::q, true, {}};
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    if (!(grid[j] < grid[j + 1])) throw DomainError("iq_property_scan grid must be strictly increasing");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double q = parameter == ScanParameter::q ? grid[j] : fixed_other;
      const double lambda0 = parameter == ScanParameter::q ? fixed_other : grid[j];
      rep.values(i, j) = iq_closed_form(times[i], QIndex(q), lambda0);
    }
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
      const double d = rep.values(i, j + 1) - rep.values(i, j);
      const bool ok = rep.expect_increasing ? d > 0.0 : d < 0.0;
      if (!ok) {
        std::ostringstream os;
        os << "t=" << times[i] << ": I(" << grid[j] << ")=" << rep.values(i, j) << ", I(" << grid[j + 1]
           << ")=" << rep.values(i, j + 1);
        rep.violations.push_back(os.str());
        rep.pass = false;
      }
    }
  }
  return rep;
}

double limit_path_value(const LimitPath& path, int n, double t) {
  if (n < 1 || !(t > 0.0)) throw DomainError("limit_path_value requires N >= 1 and t > 0");
  const double ell = path.ell(n);
  const double lambda = path.lambda(n);
  if (ell == 0.0) return std::exp(-lambda * t);
  const double u = -lambda * ell * t;
  if (!(1.0 + u > 0.0)) return 0.0;
  return std::exp(std::log1p(u) / ell);
}

double small_lambda_residual(double x, const QIndex& q) { return std::abs(q_exp(-x, q) - (1.0 - x)); }

}  // namespace tsdia
