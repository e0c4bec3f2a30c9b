#include "tsdia/cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsdia/errors.hpp"
#include "tsdia/gamma_compound.hpp"
#include "tsdia/kernels.hpp"
#include "tsdia/qcore.hpp"
#include "tsdia/random.hpp"

namespace tsdia::cli {

bool VerifyReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

Check at_most(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, "<=", value <= threshold};
}

Check holds(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, "holds", ok}; }

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

const std::vector<double> kQGrid{0.3, 0.5, 0.8, 1.0, 1.2, 1.5, 2.0, 2.5};

VerifyReport qcore_suite() {
  VerifyReport r{"qcore", {}, Json::object()};
  const std::vector<double> xs{0.3, 0.7, 1.5, 3.0};
  double additivity = 0.0;
  double round_trip = 0.0;
  for (double qv : kQGrid) {
    const QIndex q(qv);
    for (double x : xs) {
      round_trip = std::max(round_trip, std::abs(q_exp(q_log(x, q), q) - x) / x);
      for (double y : xs) {
        const double lx = q_log(x, q);
        const double ly = q_log(y, q);
        additivity = std::max(additivity, std::abs(q_log(x * y, q) - (lx + ly + q.ell() * lx * ly)));
      }
    }
  }
  r.checks.push_back(at_most("q-log pseudo-additivity residual", additivity, 1e-10));
  r.checks.push_back(at_most("q-exp(q-log x) relative residual", round_trip, 1e-12));

  const DiscreteDistribution a(vec({0.2, 0.3, 0.5}));
  const DiscreteDistribution b(vec({0.6, 0.4}));
  const DiscreteDistribution ab = product_distribution(a, b);
  double entropy_additivity = 0.0;
  double uniform_residual = 0.0;
  for (double qv : kQGrid) {
    const QIndex q(qv);
    const double sa = tsallis_entropy(a, q);
    const double sb = tsallis_entropy(b, q);
    entropy_additivity =
        std::max(entropy_additivity, std::abs(tsallis_entropy(ab, q) - (sa + sb + q.ell() * sa * sb)));
    uniform_residual =
        std::max(uniform_residual, std::abs(tsallis_entropy(DiscreteDistribution::uniform(7), q) - q_log(7.0, q)));
  }
  r.checks.push_back(at_most("entropy pseudo-additivity residual", entropy_additivity, 1e-10));
  r.checks.push_back(at_most("uniform entropy equals ln_q W", uniform_residual, 1e-12));
  r.checks.push_back(at_most("q -> 1 entropy approaches Boltzmann-Gibbs",
                             std::abs(tsallis_entropy(a, QIndex(1.0 + 1e-7)) - bg_entropy(a)), 1e-6));

  double normalization = 0.0;
  const Eigen::VectorXd energies = vec({0.0, 0.5, 1.0, 2.0, 4.0});
  for (double qv : kQGrid) {
    const auto p = maxent_distribution(energies, 1.0, QIndex(qv));
    normalization = std::max(normalization, std::abs(p.probabilities().sum() - 1.0));
  }
  r.checks.push_back(at_most("maxent normalization residual", normalization, 1e-12));
  return r;
}

VerifyReport gamma_suite() {
  VerifyReport r{"gamma", {}, Json::object()};
  const std::vector<GammaParams> laws{GammaParams(0.5, 2.0), GammaParams(0.25, 4.0), GammaParams(1.0, 0.5),
                                      GammaParams(0.01, 100.0)};
  double moments = 0.0;
  double normalization = 0.0;
  for (const auto& g : laws) {
    const GammaParams back = params_from_moments(moments_from_params(g));
    moments = std::max({moments, std::abs(back.scale() / g.scale() - 1.0), std::abs(back.shape() / g.shape() - 1.0)});
    double tail = 0.0;
    const double mass = gamma_expectation([](double) { return 1.0; }, g, 1e-13, &tail);
    normalization = std::max(normalization, std::abs(mass + tail - 1.0));
  }
  r.checks.push_back(at_most("moment map round trip", moments, 1e-12));
  r.checks.push_back(at_most("pdf normalization", normalization, 1e-10));

  double autocorr = 0.0;
  const GammaParams g(0.5, 2.0);
  for (double tau : {0.0, 0.5, 1.0, 2.0, 5.0})
    autocorr = std::max(autocorr, std::abs(marginal_autocorr(tau, 1.0, g) - marginal_autocorr_quadrature(tau, 1.0, g)));
  r.checks.push_back(at_most("compounded autocovariance closed form vs quadrature", autocorr, 1e-8));

  double tsallis_map = 0.0;
  for (double c : {0.5, 2.0, 10.0}) {
    const GammaParams p = params_from_tsallis(1.5, q_from_shape(c));
    tsallis_map = std::max({tsallis_map, std::abs(p.shape() - c) / c, std::abs(p.mean() - 1.5)});
  }
  r.checks.push_back(at_most("(lambda0, q) <-> (a, c) round trip", tsallis_map, 1e-12));

  double worst_z = 0.0;
  for (const auto& law : laws) {
    RandomStream rng(2024);
    constexpr int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_rate(rng, law);
    worst_z = std::max(worst_z, std::abs(sum / n - law.mean()) / (law.stddev() / std::sqrt(double(n))));
  }
  r.checks.push_back(at_most("sampler mean |z| (1e5 draws per law)", worst_z, 4.0));
  return r;
}

VerifyReport kernels_suite() {
  VerifyReport r{"kernels", {}, Json::object()};
  double zero_lag = 0.0;
  for (double qv : kQGrid)
    zero_lag = std::max(zero_lag, std::abs(NoiseKernel::tsallis(2.5, 0.7, QIndex(qv))(0.0) - 2.5));
  zero_lag = std::max(zero_lag, std::abs(NoiseKernel::linear_small_lambda(2.5, 0.7)(0.0) - 2.5));
  r.checks.push_back(at_most("kernel at zero lag equals sigma_b2", zero_lag, 0.0));

  double degeneration = 0.0;
  const auto ou = NoiseKernel::ou(1.0, 1.0);
  for (double qv : {1.0 - 1e-7, 1.0 + 1e-7}) {
    const auto k = NoiseKernel::tsallis(1.0, 1.0, QIndex(qv));
    for (int i = 0; i <= 2000; ++i) degeneration = std::max(degeneration, std::abs(k(0.01 * i) - ou(0.01 * i)));
  }
  r.checks.push_back(at_most("q -> 1 kernel degeneration on [0, 20]", degeneration, 1e-6));

  double closed_vs_quad = 0.0;
  for (double qv : {0.5, 0.8, 1.1, 1.25, 1.7, 2.5})
    for (double lambda : {0.5, 1.0, 2.0})
      for (double t : {0.5, 1.0, 3.0}) {
        const auto k = NoiseKernel::tsallis(1.0, lambda, QIndex(qv));
        closed_vs_quad = std::max(closed_vs_quad, std::abs(iq_closed_form(t, QIndex(qv), lambda) - iq_quadrature(t, k)));
      }
  r.checks.push_back(at_most("I_q closed form vs quadrature", closed_vs_quad, 1e-8));
  r.checks.push_back(at_most("I_q OU limit at lambda0 = 2, t = 1",
                             std::abs(iq_closed_form(1.0, QIndex(1.0), 2.0) - (1.0 + std::exp(-2.0)) / 4.0), 1e-12));
  r.checks.push_back(at_most("white-noise weight sigma_b2/lambda0",
                             std::abs(white_noise_weight(NoiseKernel::white(1.0, 50.0)) - 0.02), 1e-15));

  double second_derivative = 0.0;
  const double h = 1e-4;
  for (double qv : {0.5, 1.25, 2.5}) {
    const auto k = NoiseKernel::tsallis(1.0, 1.0, QIndex(qv));
    const double d2 = (2 * iq_quadrature(0.0, k) - 5 * iq_quadrature(h, k) + 4 * iq_quadrature(2 * h, k) -
                       iq_quadrature(3 * h, k)) /
                      (h * h);
    second_derivative = std::max(second_derivative, std::abs(d2 - 1.0));
  }
  r.checks.push_back(at_most("I''(0) = g(0) by finite differences", second_derivative, 1e-6));
  return r;
}

VerifyReport appendix_b_suite() {
  VerifyReport r{"appendix-b", {}, Json::object()};
  Json table = Json::array();
  const std::vector<double> cs{1.0, 10.0, 1e2, 1e3, 1e4};
  std::vector<double> smooth_exp, smooth_rational;
  double variance_probe = 0.0;
  for (double c : cs) {
    const double var = delta_limit_error(c, [](double l) { return l * l; });
    const double e1 = delta_limit_error(c, [](double l) { return std::exp(-l); });
    const double e2 = delta_limit_error(c, [](double l) { return 1.0 / (1.0 + l); });
    smooth_exp.push_back(e1);
    smooth_rational.push_back(e2);
    if (c >= 1e2) variance_probe = std::max(variance_probe, std::abs(var * c - 1.0));
    table.push_back({{"c", c}, {"lambda^2", var}, {"exp(-lambda)", e1}, {"1/(1+lambda)", e2}});
  }
  r.data["error_vs_c"] = table;
  r.checks.push_back(at_most("lambda^2 probe equals 1/c (relative, c >= 100)", variance_probe, 1e-12));
  const auto decreasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] < v[i - 1])) return false;
    return true;
  };
  r.checks.push_back(holds("exp(-lambda) probe error decreases in c", decreasing(smooth_exp)));
  r.checks.push_back(holds("1/(1+lambda) probe error decreases in c", decreasing(smooth_rational)));
  return r;
}

VerifyReport appendix_c_suite() {
  VerifyReport r{"appendix-c", {}, Json::object()};
  const LimitPath exponential{[](int) { return 0.0; }, [](int n) { return double(n); }, "ell = 0, lambda = N"};
  r.checks.push_back(at_most("iterated limit: e^{-lambda t} at lambda = 1e3, t = 1",
                             limit_path_value(exponential, 1000, 1.0), 1e-100));

  const LimitPath classical{[](int n) { return 1.0 / n; }, [](int) { return 1.0; }, "ell = 1/N, lambda = 1"};
  r.checks.push_back(at_most("iterated limit: (1 - t/N)^N -> e^{-1} at N = 1e6",
                             std::abs(limit_path_value(classical, 1000000, 1.0) - std::exp(-1.0)), 1e-6));

  const LimitPath cutoff{[](int n) { return 1.0 / n; }, [](int n) { return double(n); }, "lambda ell = 1"};
  double cut = 0.0;
  for (int n = 1; n <= 50; ++n) cut = std::max(cut, limit_path_value(cutoff, n, 1.0));
  r.checks.push_back(at_most("lambda ell = 1 path at t = 1 is cut off", cut, 0.0));

  double taylor_excess = -std::numeric_limits<double>::infinity();
  for (double qv : {0.2, 0.5, 0.9, 1.0, 1.1, 1.5, 2.0, 3.0}) {
    for (int i = 0; i <= 20; ++i) {
      const double x = 0.005 * i;
      taylor_excess = std::max(taylor_excess, small_lambda_residual(x, QIndex(qv)) - x * x * std::max(1.0, qv));
    }
  }
  r.checks.push_back(at_most("small-lambda Taylor bound excess", taylor_excess, 0.0));

  double normalization = 0.0;
  for (double lambda : {0.1, 1.0, 10.0, 100.0})
    normalization = std::max(normalization, std::abs(white_noise_weight_normalization(lambda) - 1.0));
  r.checks.push_back(at_most("white-noise weight normalization", normalization, 1e-10));
  return r;
}

VerifyReport appendix_d_suite() {
  VerifyReport r{"appendix-d", {}, Json::object()};
  const double closed = iq_closed_form(1.0, QIndex(1.25), 1.0);
  const double quad = iq_quadrature(1.0, NoiseKernel::tsallis(1.0, 1.0, QIndex(1.25)));
  r.checks.push_back(at_most("I_q(q = 1.25, lambda0 = 1, t = 1) - 0.3733333", std::abs(closed - 0.3733333), 1e-7));
  r.checks.push_back(at_most("closed form vs quadrature at q = 1.25", std::abs(closed - quad), 1e-9));

  const std::vector<double> times{1.0, 5.0, 10.0};
  const auto record = [&](const std::string& key, const MonotonicityReport& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
      std::vector<double> row(m.values.cols());
      for (Eigen::Index j = 0; j < m.values.cols(); ++j) row[j] = m.values(i, j);
      rows.push_back({{"t", m.times[i]}, {"values", row}});
    }
    r.data[key] = {{"grid", m.grid}, {"rows", rows}, {"pass", m.pass}, {"violations", m.violations}};
  };
  const auto p1 = iq_property_scan(ScanParameter::q, {0.2, 0.4, 0.6, 0.8}, 0.1, times);
  const auto p2 = iq_property_scan(ScanParameter::lambda0, {0.5, 1.0, 2.0, 4.0}, 1.1, times);
  const auto p2_ou = iq_property_scan(ScanParameter::lambda0, {0.5, 1.0, 2.0, 4.0}, 1.0, times);
  record("property_1", p1);
  record("property_2", p2);
  record("property_2_q1", p2_ou);
  r.checks.push_back(holds("Property 1: I_q increases with q (q < 1)", p1.pass));
  r.checks.push_back(holds("Property 2: I_q decreases with lambda0 (q > 1)", p2.pass));
  r.checks.push_back(holds("I_q decreases with lambda0 at q = 1", p2_ou.pass));
  return r;
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names{"qcore", "gamma", "kernels", "appendix-b", "appendix-c", "appendix-d"};
  return names;
}

VerifyReport run_suite(const std::string& suite) {
  if (suite == "qcore") return qcore_suite();
  if (suite == "gamma") return gamma_suite();
  if (suite == "kernels") return kernels_suite();
  if (suite == "appendix-b") return appendix_b_suite();
  if (suite == "appendix-c") return appendix_c_suite();
  if (suite == "appendix-d") return appendix_d_suite();
  throw ConfigError("suite", "unknown verify suite '" + suite + "'");
}

Json to_json(const VerifyReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(
        {{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"relation", c.relation}, {"pass", c.pass}});
  return {{"schema_version", kSchemaVersion}, {"suite", r.suite}, {"checks", checks}, {"data", r.data},
          {"pass", r.pass()}};
}

}  // namespace tsdia::cli
