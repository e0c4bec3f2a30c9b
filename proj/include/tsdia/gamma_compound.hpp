#pragma once

#include <functional>

#include "tsdia/qcore.hpp"
#include "tsdia/random.hpp"

namespace tsdia {

/// Gamma law of the inverse autocorrelation time: scale a (1/time), shape c.
class GammaParams {
 public:
  GammaParams(double scale, double shape);

  double scale() const { return a_; }
  double shape() const { return c_; }
  double mean() const { return a_ * c_; }
  double variance() const { return a_ * a_ * c_; }
  double stddev() const;

 private:
  double a_;
  double c_;
};

/// Mean and variance of the rate. sigma_lambda2 is the variance of lambda, not of the noise.
struct RateMoments {
  double lambda0;
  double sigma_lambda2;
};

double gamma_pdf(double lambda, const GammaParams& g);

GammaParams params_from_moments(const RateMoments& m);
RateMoments moments_from_params(const GammaParams& g);

/// q = 1 + 1/c.
QIndex q_from_shape(double c);

/// Gamma parameters whose compounding reproduces a q-exponential with mean rate lambda0:
/// c = 1/(q-1), a = lambda0/c. Requires q > 1.
GammaParams params_from_tsallis(double lambda0, const QIndex& q);

/// One draw from the gamma law (Marsaglia-Tsang; c < 1 via the U^{1/c} boost).
double sample_rate(RandomStream& rng, const GammaParams& g);

/// Closed-form compound autocovariance sigma_b2 / (1 + a tau)^c.
double marginal_autocorr(double tau, double sigma_b2, const GammaParams& g);

/// E[h(lambda)] under the gamma law by adaptive quadrature over [0, lambda0 + 40 a sqrt(c)]
/// (split around the mode). `tail_mass` receives the probability beyond the upper limit.
double gamma_expectation(const std::function<double(double)>& h, const GammaParams& g, double abs_tol = 1e-13,
                         double* tail_mass = nullptr);

/// Compound autocovariance computed by quadrature of sigma_b2 e^{-lambda tau} against the pdf.
double marginal_autocorr_quadrature(double tau, double sigma_b2, const GammaParams& g);

/// |E[probe(lambda)] - probe(lambda0)| for the gamma law with mean lambda0 and shape c.
/// The centred integrand is integrated in standardized units and divided by the total mass under
/// the same rule.
double delta_limit_error(double c, const std::function<double(double)>& probe, double lambda0 = 1.0);

}  // namespace tsdia
