#include <doctest.h>

#include "oracles.hpp"
#include "tsdia/kernels.hpp"

using namespace tsdia;
using doctest::Approx;

TEST_CASE("kernel kinds and names") {
  for (auto k : {KernelKind::ou, KernelKind::tsallis, KernelKind::linear_small_lambda, KernelKind::white})
    CHECK(kernel_kind_from_string(to_string(k)) == k);
  CHECK(std::string(to_string(KernelKind::linear_small_lambda)) == "linear-small-lambda");
  CHECK_THROWS_AS(kernel_kind_from_string("gauss"), DomainError);
}

TEST_CASE("eval_kernel examples") {
  CHECK(NoiseKernel::tsallis(1.0, 1.0, QIndex(1.25))(0.0) == 1.0);
  CHECK(eval_kernel(NoiseKernel::tsallis(1.0, 1.0, QIndex(2.0)), 1.0) == Approx(0.5));
  CHECK(NoiseKernel::tsallis(1.0, 1.0, QIndex(0.5))(3.0) == 0.0);
  CHECK(NoiseKernel::tsallis(1.0, 1.0, QIndex(0.5)).support_end() == Approx(2.0));
  CHECK(NoiseKernel::ou(2.0, 0.5)(1.0) == Approx(2.0 * std::exp(-0.5)));
  CHECK(NoiseKernel::linear_small_lambda(3.0, 0.5)(1.0) == Approx(1.5));
  CHECK(NoiseKernel::linear_small_lambda(3.0, 0.5)(4.0) == 0.0);
  CHECK_THROWS_AS(NoiseKernel::white(1.0, 2.0)(0.1), DomainError);
  CHECK_THROWS_AS(NoiseKernel::ou(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(NoiseKernel::ou(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(NoiseKernel::white(1.0, 0.0), DomainError);
}

TEST_CASE("property: even extension, nonnegativity, q -> 1 degeneration") {
  for (double q : {0.5, 1.0, 1.3, 2.2}) {
    const auto k = NoiseKernel::tsallis(1.7, 0.9, QIndex(q));
    for (double tau = 0.0; tau < 10.0; tau += 0.37) {
      CHECK(k(tau) == k(-tau));
      CHECK(k(tau) >= 0.0);
      CHECK(k.shape(tau) == Approx(k(tau) / 1.7));
    }
  }
  const auto ou = NoiseKernel::ou(1.0, 1.0);
  for (double q : {1.0 - 1e-7, 1.0 + 1e-7}) {
    const auto k = NoiseKernel::tsallis(1.0, 1.0, QIndex(q));
    for (double tau = 0.0; tau <= 20.0; tau += 0.01) CHECK(std::abs(k(tau) - ou(tau)) <= 1e-6);
  }
}

TEST_CASE("iq_closed_form examples") {
  CHECK(iq_closed_form(1.0, QIndex(1.25), 1.0) == Approx(0.3733333).epsilon(1e-7));
  CHECK(iq_closed_form(1.0, QIndex(1.0), 1.0) == Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(iq_closed_form(0.0, QIndex(1.7), 1.0) == 0.0);
  for (double q : {0.5, 1.0, 1.5, 2.0, 2.5}) {
    const double t = 1e-3;
    CHECK(iq_closed_form(t, QIndex(q), 1.0) == Approx(t * t / 2.0).epsilon(1e-3));
  }
  CHECK(iq_quadrature(1.0, NoiseKernel::ou(1.0, 2.0)) == Approx(0.2838338).epsilon(1e-7));
  CHECK(iq_quadrature(0.0, NoiseKernel::ou(1.0, 2.0)) == 0.0);
  CHECK(std::abs(iq_quadrature(1.0, NoiseKernel::tsallis(1.0, 1.0, QIndex(1.25))) - 0.3733333) <= 1e-7);
}

TEST_CASE("property: closed form against the oracle and quadrature") {
  for (double q : {0.3, 0.7, 0.95, 1.05, 1.25, 1.499, 1.502, 1.8, 1.9985, 2.3, 3.0})
    for (double lambda : {0.1, 1.0, 3.0})
      for (double t : {0.2, 1.0, 4.0, 12.0}) {
        const double closed = iq_closed_form(t, QIndex(q), lambda);
        const double quad = iq_quadrature(t, NoiseKernel::tsallis(1.0, lambda, QIndex(q)));
        CHECK(std::abs(closed - quad) <= 1e-8 * std::max(1.0, quad));
        if (std::abs(q - 1.5) > 1e-3 && std::abs(q - 2.0) > 1e-3)
          CHECK(closed == Approx(oracle::iq(t, q, lambda)).epsilon(1e-10));
      }
  for (double t : {0.5, 2.0}) {
    CHECK(iq_closed_form(t, QIndex(1.5), 1.0) == Approx(iq_quadrature(t, NoiseKernel::tsallis(1.0, 1.0, QIndex(1.5)))));
    CHECK(iq_closed_form(t, QIndex(2.0), 1.0) == Approx(iq_quadrature(t, NoiseKernel::tsallis(1.0, 1.0, QIndex(2.0)))));
  }
}

TEST_CASE("property: I relations by finite differences") {
  const double h = 1e-4;
  for (double q : {0.6, 1.0, 1.4}) {
    const auto k = NoiseKernel::tsallis(1.0, 0.8, QIndex(q));
    for (double t : {0.5, 1.5}) {
      const double d1 = (iq_quadrature(t + h, k) - iq_quadrature(t - h, k)) / (2 * h);
      double g_int = 0.0;
      const int n = 2000;
      for (int i = 0; i <= n; ++i) g_int += (i == 0 || i == n ? 0.5 : 1.0) * k.shape(t * i / n) * t / n;
      CHECK(d1 == Approx(g_int).epsilon(1e-6));
    }
    const double d2 = (2 * iq_quadrature(0.0, k) - 5 * iq_quadrature(h, k) + 4 * iq_quadrature(2 * h, k) -
                       iq_quadrature(3 * h, k)) /
                      (h * h);
    CHECK(std::abs(d2 - 1.0) <= 1e-6);
  }
}

TEST_CASE("ou_phase_integral") {
  CHECK(ou_phase_integral(0.0, 3.0) == Approx(4.5));
  CHECK(ou_phase_integral(2.0, 1.0) == Approx(oracle::iq_ou(1.0, 2.0)));
  CHECK(ou_phase_integral(1e-9, 2.0) == Approx(2.0).epsilon(1e-9));
  for (double x : {0.05, 0.099, 0.101, 0.5}) CHECK(ou_phase_integral(x, 1.0) == Approx(oracle::iq_ou(1.0, x)).epsilon(1e-9));
  CHECK(ou_phase_integral(1e-6, 1.0) == Approx(0.5 - 1e-6 / 6.0 + 1e-12 / 24.0).epsilon(1e-15));
}

TEST_CASE("monotonicity properties") {
  const std::vector<double> times{1.0, 5.0, 10.0};
  const auto p1 = iq_property_scan(ScanParameter::q, {0.2, 0.4, 0.6, 0.8}, 0.1, times);
  CHECK(p1.pass);
  CHECK(p1.expect_increasing);
  CHECK(p1.values.rows() == 3);
  CHECK(p1.values.cols() == 4);
  const auto p2 = iq_property_scan(ScanParameter::lambda0, {0.5, 1.0, 2.0, 4.0}, 1.1, times);
  CHECK(p2.pass);
  CHECK_FALSE(p2.expect_increasing);
  CHECK(iq_property_scan(ScanParameter::lambda0, {0.5, 1.0, 2.0, 4.0}, 1.0, times).pass);
  CHECK_THROWS_AS(iq_property_scan(ScanParameter::q, {0.8, 0.6}, 0.1, times), DomainError);
}

TEST_CASE("limit paths and white-noise weight") {
  const LimitPath iterated{[](int) { return 0.0; }, [](int n) { return double(n); }, "exp"};
  CHECK(limit_path_value(iterated, 1000, 1.0) < 1e-100);
  const LimitPath classical{[](int n) { return 1.0 / n; }, [](int) { return 1.0; }, "classical"};
  CHECK(limit_path_value(classical, 100000, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-5));
  const LimitPath cutoff{[](int n) { return 1.0 / n; }, [](int n) { return double(n); }, "cutoff"};
  for (int n = 1; n < 20; ++n) CHECK(limit_path_value(cutoff, n, 1.0) == 0.0);

  CHECK(white_noise_weight(NoiseKernel::white(1.0, 50.0)) == Approx(0.02));
  CHECK(white_noise_weight(NoiseKernel::ou(4.0, 2.0)) == Approx(2.0));
  for (double l : {0.01, 1.0, 300.0}) CHECK(std::abs(white_noise_weight_normalization(l) - 1.0) <= 1e-10);
}

TEST_CASE("property: small-lambda Taylor bound") {
  for (double q = 0.1; q <= 4.0; q += 0.1)
    for (double x = 0.0; x <= 0.1; x += 0.0025)
      CHECK(small_lambda_residual(x, QIndex(q)) <= x * x * std::max(1.0, std::abs(q)) + 1e-15);
}
