#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "tsdia/qcore.hpp"

namespace tsdia {

enum class KernelKind { ou, tsallis, linear_small_lambda, white };

const char* to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

/// Autocovariance model of the noise b(t).
///
/// All pointwise kinds are evaluated at |tau| (stationary, even extension). The white kind
/// is distributional: it is only available through its delta weight sigma_b2 / lambda0.
/// lambda0 = 0 is accepted for pointwise kinds and gives a constant (frozen) kernel.
class NoiseKernel {
 public:
  static NoiseKernel ou(double sigma_b2, double lambda0);
  static NoiseKernel tsallis(double sigma_b2, double lambda0, QIndex q);
  static NoiseKernel linear_small_lambda(double sigma_b2, double lambda0);
  static NoiseKernel white(double sigma_b2, double lambda0);

  KernelKind kind() const { return kind_; }
  double sigma_b2() const { return sigma_b2_; }
  double lambda0() const { return lambda0_; }
  const QIndex& q() const { return q_; }
  bool pointwise() const { return kind_ != KernelKind::white; }

  /// Autocovariance at lag tau. Throws DomainError for the white kind.
  double operator()(double tau) const;

  /// Kernel divided by sigma_b2 (unit variance shape g(tau)).
  double shape(double tau) const;

  /// End of the support for q < 1 (and for the linear kind); +inf otherwise.
  double support_end() const;

 private:
  NoiseKernel(KernelKind kind, double sigma_b2, double lambda0, QIndex q);

  KernelKind kind_;
  double sigma_b2_;
  double lambda0_;
  QIndex q_;
};

/// Same as k(tau).
double eval_kernel(const NoiseKernel& k, double tau);

/// Coefficient of delta(t) in the large-lambda approximation: sigma_b2 / lambda0.
double white_noise_weight(const NoiseKernel& k);

/// int_0^inf lambda e^{-lambda t} dt by quadrature (equals 1).
double white_noise_weight_normalization(double lambda);

/// (lambda t - 1 + e^{-lambda t}) / lambda^2 with a series branch for small lambda t;
/// equals t^2/2 at lambda = 0.
double ou_phase_integral(double lambda, double t);

/// Unit-variance I_q(t) = int_0^t (t - tau) e_q^{-lambda0 tau} dtau in closed form.
/// Within 1e-3 of the singular indices q = 3/2 and q = 2 it defers to quadrature.
double iq_closed_form(double t, const QIndex& q, double lambda0);

/// Unit-variance I(t) = int_0^t (t - tau) k(tau) dtau / sigma_b2 by adaptive quadrature (abs tol 1e-10).
double iq_quadrature(double t, const NoiseKernel& kernel);

/// Width of the window around q = 3/2 and q = 2 where iq_closed_form uses quadrature.
inline constexpr double kIqSingularWindow = 1e-3;

enum class ScanParameter { q, lambda0 };

struct MonotonicityReport {
  ScanParameter parameter;
  std::vector<double> grid;
  std::vector<double> times;
  Eigen::MatrixXd values;  // rows: times, cols: grid points
  bool expect_increasing;
  bool pass;
  std::vector<std::string> violations;
};

/// Scans I_q(t) along `grid` (sorted) for q (others fixed: lambda0) or lambda0 (fixed: q) and checks
/// the expected direction: increasing in q for q < 1, decreasing in lambda0 for q > 1 (and q = 1).
MonotonicityReport iq_property_scan(ScanParameter parameter, const std::vector<double>& grid, double fixed_other,
                                    const std::vector<double>& times);

/// N -> (ell(N), lambda(N)); ell = 0 means the exponential branch.
struct LimitPath {
  std::function<double(int)> ell;
  std::function<double(int)> lambda;
  std::string description;
};

/// max{0, 1 - lambda(N) ell(N) t}^{1/ell(N)} (e^{-lambda t} when ell(N) = 0).
double limit_path_value(const LimitPath& path, int n, double t);

/// Absolute deviation |e_q^{-x} - (1 - x)| of the first-order small-lambda form.
double small_lambda_residual(double x, const QIndex& q);

}  // namespace tsdia
