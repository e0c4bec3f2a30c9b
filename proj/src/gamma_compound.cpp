#include "tsdia/gamma_compound.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "tsdia/quadrature.hpp"

namespace tsdia {

GammaParams::GammaParams(double scale, double shape) : a_(scale), c_(shape) {
  if (!(scale > 0.0) || !(shape > 0.0) || !std::isfinite(scale) || !std::isfinite(shape)) {
    std::ostringstream os;
    os << "gamma parameters need a > 0 and c > 0 (a = " << scale << ", c = " << shape << ")";
    throw DomainError(os.str());
  }
}

double GammaParams::stddev() const { return a_ * std::sqrt(c_); }

namespace {

// lgamma(c) - ((c - 1/2) log c - c + log(2 pi)/2)
double stirling_correction(double c) {
  if (c < 10.0) return std::lgamma(c) - ((c - 0.5) * std::log(c) - c + 0.5 * std::log(2.0 * std::numbers::pi));
  const double r = 1.0 / c, r2 = r * r;
  return r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 / 1680.0)));
}

}  // namespace

double gamma_pdf(double lambda, const GammaParams& g) {
  if (!(lambda >= 0.0)) throw DomainError("gamma_pdf requires lambda >= 0");
  const double a = g.scale();
  const double c = g.shape();
  if (lambda == 0.0) {
    if (c < 1.0) return std::numeric_limits<double>::infinity();
    return c == 1.0 ? 1.0 / a : 0.0;
  }
  const double u = lambda / a;
  if (c < 2.0) return std::exp((c - 1.0) * std::log(u) - u - std::lgamma(c)) / a;
  // expanded about the mode: u = c (1 + v)
  const double v = u / c - 1.0;
  return std::exp((c - 1.0) * std::log1p(v) - c * v - 0.5 * std::log(2.0 * std::numbers::pi * c) -
                  stirling_correction(c)) /
         a;
}

GammaParams params_from_moments(const RateMoments& m) {
  if (!(m.lambda0 > 0.0) || !(m.sigma_lambda2 > 0.0)) throw DomainError("rate moments must be positive");
  return GammaParams(m.sigma_lambda2 / m.lambda0, m.lambda0 * m.lambda0 / m.sigma_lambda2);
}

RateMoments moments_from_params(const GammaParams& g) { return {g.mean(), g.variance()}; }

QIndex q_from_shape(double c) {
  if (!(c > 0.0)) throw DomainError("q_from_shape requires c > 0");
  return QIndex(1.0 + 1.0 / c);
}

GammaParams params_from_tsallis(double lambda0, const QIndex& q) {
  if (!(q.q() > 1.0)) throw DomainError("compounding produces q > 1 only");
  const double c = 1.0 / (q.q() - 1.0);
  return GammaParams(lambda0 / c, c);
}

namespace {

double marsaglia_tsang(RandomStream& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double k = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + k * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

double sample_rate(RandomStream& rng, const GammaParams& g) {
  const double c = g.shape();
  if (c >= 1.0) return g.scale() * marsaglia_tsang(rng, c);
  const double boosted = marsaglia_tsang(rng, c + 1.0);
  return g.scale() * boosted * std::pow(rng.uniform(), 1.0 / c);
}

double marginal_autocorr(double tau, double sigma_b2, const GammaParams& g) {
  if (!(tau >= 0.0)) throw DomainError("marginal_autocorr requires tau >= 0");
  return sigma_b2 * std::exp(-g.shape() * std::log1p(g.scale() * tau));
}

double gamma_expectation(const std::function<double(double)>& h, const GammaParams& g, double abs_tol,
                         double* tail_mass) {
  const double a = g.scale();
  const double c = g.shape();
  const double mean = g.mean();
  const double sd = g.stddev();
  const double upper = a * (c + 40.0 * std::max(std::sqrt(c), 1.0));
  if (tail_mass) *tail_mass = boost::math::gamma_q(c, upper / a);

  const auto integrand = [&](double lambda) {
    const double w = gamma_pdf(lambda, g);
    return w == 0.0 ? 0.0 : h(lambda) * w;
  };

  if (c < 1.0) return integrate_endpoint_singular(integrand, 0.0, upper, abs_tol).value;

  std::vector<double> cuts{0.0, mean - 40.0 * sd, mean - 8.0 * sd, mean - sd, mean, mean + sd, mean + 8.0 * sd, upper};
  for (double& x : cuts) x = std::clamp(x, 0.0, upper);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return integrate_piecewise(integrand, cuts, abs_tol, 1e-12).value;
}

double marginal_autocorr_quadrature(double tau, double sigma_b2, const GammaParams& g) {
  if (!(tau >= 0.0)) throw DomainError("marginal_autocorr_quadrature requires tau >= 0");
  return sigma_b2 * gamma_expectation([tau](double lambda) { return std::exp(-lambda * tau); }, g, 1e-14);
}

double delta_limit_error(double c, const std::function<double(double)>& probe, double lambda0) {
  const GammaParams g(lambda0 / c, c);
  const double centre = probe(lambda0);
  if (c < 1.0) return std::abs(gamma_expectation([&](double lambda) { return probe(lambda) - centre; }, g, 1e-13));

  // standardized variable u = (lambda - mean)/sd, lambda/mean = 1 + u/sqrt(c)
  const double root_c = std::sqrt(c);
  const auto weight = [&](double u) {
    const double v = u / root_c;
    return v <= -1.0 ? 0.0 : std::exp((c - 1.0) * std::log1p(v) - c * v);
  };
  const double lo = -std::min(root_c, 40.0);
  const double hi = 40.0 * std::max(1.0, 1.0 / root_c);
  const int panels = static_cast<int>(std::ceil(hi - lo));
  const double width = (hi - lo) / panels;
  using rule = boost::math::quadrature::gauss<double, 30>;
  double mass = 0.0;
  double moment = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double x0 = lo + k * width;
    mass += rule::integrate(weight, x0, x0 + width);
    moment += rule::integrate(
        [&](double u) { return weight(u) * (probe(lambda0 * (1.0 + u / root_c)) - centre); }, x0, x0 + width);
  }
  return std::abs(moment / mass);
}

}  // namespace tsdia
