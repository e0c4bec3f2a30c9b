#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "tsdia/closures.hpp"
#include "tsdia/errors.hpp"

using namespace tsdia;
using doctest::Approx;

namespace {

ClosureProblem problem(ClosureModel model, ClosureMethod method, NoiseKernel k, double nu) {
  ClosureProblem p;
  p.model = model;
  p.method = method;
  p.kernel = k;
  p.nu = nu;
  return p;
}

double max_gap(const GreenFunction& a, const GreenFunction& b) {
  const int stride = static_cast<int>(std::lround(b.grid.dt() / a.grid.dt()));
  double worst = 0.0;
  for (int i = 0; i < b.grid.size(); ++i) worst = std::max(worst, std::abs(a.values[i * stride] - b.values[i]));
  return worst;
}

}  // namespace

TEST_CASE("enum names") {
  CHECK(std::string(to_string(ClosureModel::non_markov)) == "non-markov");
  CHECK(closure_method_from_string("dia") == ClosureMethod::dia);
  CHECK_THROWS_AS(closure_model_from_string("semi-markov"), DomainError);
  CHECK_THROWS_AS(closure_method_from_string("rpa"), DomainError);
  CHECK_THROWS_AS(problem(ClosureModel::markov, ClosureMethod::dia, NoiseKernel::ou(1, 1), -1).validate(), DomainError);
}

TEST_CASE("volterra_perturbative examples") {
  const TimeGrid g = TimeGrid::covering(0.005, 10.0);
  const auto frozen =
      volterra_perturbative(problem(ClosureModel::markov, ClosureMethod::perturbative,
                                    NoiseKernel::linear_small_lambda(1.0, 0.0), 0.3), g);
  double worst = 0.0;
  for (int i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(frozen.values[i].real() - std::exp(-0.3 * g.node(i)) * std::cos(g.node(i))));
  CHECK(worst <= 1e-4);
  CHECK(frozen.values[0] == std::complex<double>(1.0, 0.0));
  CHECK(frozen.provenance == Provenance::closure);

  const TimeGrid fine = TimeGrid::covering(0.001, 10.0);
  const auto quiet = volterra_perturbative(
      problem(ClosureModel::non_markov, ClosureMethod::perturbative, NoiseKernel::ou(1e-12, 1.0), 1.0), fine);
  worst = 0.0;
  for (int i = 0; i < fine.size(); ++i) worst = std::max(worst, std::abs(quiet.values[i].real() - std::cos(fine.node(i))));
  CHECK(worst <= 1e-6);

  const auto ou = problem(ClosureModel::markov, ClosureMethod::perturbative, NoiseKernel::ou(1.0, 0.1), 0.0);
  CHECK(max_gap(volterra_perturbative(ou, g), laplace_inverted_green(ou, g, {}, 10)) <= 1e-3);
}

TEST_CASE("property: second-order convergence in dt") {
  const auto prob = problem(ClosureModel::markov, ClosureMethod::perturbative, NoiseKernel::linear_small_lambda(1.0, 0.0), 0.0);
  double err[2];
  int k = 0;
  for (double dt : {0.02, 0.01}) {
    const TimeGrid g = TimeGrid::covering(dt, 5.0);
    const auto sol = volterra_perturbative(prob, g);
    err[k++] = std::abs(sol.values[g.steps()].real() - std::cos(5.0));
  }
  CHECK(err[0] / err[1] == Approx(4.0).epsilon(0.15));
}

TEST_CASE("volterra_dia examples") {
  const TimeGrid g = TimeGrid::covering(0.005, 10.0);
  const auto bessel =
      volterra_dia(problem(ClosureModel::markov, ClosureMethod::dia, NoiseKernel::tsallis(1.0, 0.0, QIndex(1.0)), 0.0), g);
  double worst = 0.0;
  for (int i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(bessel.values[i].real() - oracle::bessel_dia(g.node(i), 1.0)));
  CHECK(worst <= 1e-4);
  CHECK(bessel.values[0] == std::complex<double>(1.0, 0.0));

  const auto shifted = problem(ClosureModel::markov, ClosureMethod::dia, NoiseKernel::ou(1.0, 0.2), 0.0);
  CHECK(max_gap(volterra_dia(shifted, g), laplace_inverted_green(shifted, g, {}, 10)) <= 2e-3);
}

TEST_CASE("property: cross-domain agreement for small lambda") {
  const TimeGrid g = TimeGrid::covering(0.005, 10.0);
  for (auto model : {ClosureModel::markov, ClosureModel::non_markov})
    for (auto method : {ClosureMethod::perturbative, ClosureMethod::dia}) {
      const auto prob = problem(model, method, NoiseKernel::ou(1.0, 0.2), model == ClosureModel::markov ? 0.3 : 1.0);
      CAPTURE(to_string(model));
      CAPTURE(to_string(method));
      CHECK(max_gap(solve_time_domain(prob, g), laplace_inverted_green(prob, g, {}, 10)) <= 2e-3);
    }
}

TEST_CASE("property: linear-small-lambda kernel matches its exact transform") {
  // L[sigma^2 (1 - lambda tau)] = sigma^2 (1/p - lambda/p^2) while lambda tau < 1.
  const double lambda = 0.1;
  const TimeGrid g = TimeGrid::covering(0.005, 5.0);
  const auto sol = volterra_perturbative(
      problem(ClosureModel::markov, ClosureMethod::perturbative, NoiseKernel::linear_small_lambda(1.0, lambda), 0.0), g);
  InversionOptions opts;
  opts.abscissa = 0.2;
  const Transform pre = [&](Complex p) { return 1.0 / (p + 1.0 / p - lambda / (p * p)); };
  double worst = 0.0;
  for (int i = 10; i < g.size(); i += 10) worst = std::max(worst, std::abs(sol.values[i].real() - invert_laplace(pre, g.node(i), opts)));
  CHECK(worst <= 2e-3);
}

TEST_CASE("property: DIA corrections shrink toward white noise") {
  const TimeGrid g = TimeGrid::covering(0.002, 5.0);
  double previous = 1e300;
  for (double lambda : {10.0, 30.0, 100.0}) {
    const auto k = NoiseKernel::ou(lambda, lambda);
    const auto pert = volterra_perturbative(problem(ClosureModel::markov, ClosureMethod::perturbative, k, 0.0), g);
    const auto dia = volterra_dia(problem(ClosureModel::markov, ClosureMethod::dia, k, 0.0), g);
    const double gap = max_gap(dia, pert);
    CAPTURE(lambda);
    CHECK(gap < previous);
    previous = gap;
  }
}

TEST_CASE("property: time-domain solutions are real") {
  const TimeGrid g = TimeGrid::covering(0.01, 5.0);
  for (auto method : {ClosureMethod::perturbative, ClosureMethod::dia}) {
    const auto sol = solve_time_domain(problem(ClosureModel::non_markov, method, NoiseKernel::tsallis(1.0, 0.5, QIndex(1.3)), 1.0), g);
    CHECK(sol.values.imag().cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("white kernel goes to closed forms") {
  const TimeGrid g = TimeGrid::covering(0.01, 2.0);
  const auto prob = problem(ClosureModel::markov, ClosureMethod::dia, NoiseKernel::white(2.0, 4.0), 0.1);
  CHECK_THROWS_AS(volterra_dia(prob, g), DomainError);
  CHECK_THROWS_AS(volterra_perturbative(prob, g), DomainError);
  const auto sol = solve_time_domain(prob, g);
  CHECK(sol.values[100].real() == Approx(std::exp(-0.6)).epsilon(1e-14));
  CHECK(closed_form_green(prob, g).values[200].real() == Approx(std::exp(-1.2)).epsilon(1e-14));
}

TEST_CASE("laplace_perturbative examples") {
  const auto frozen = NoiseKernel::ou(1.0, 0.0);
  CHECK(std::abs(laplace_perturbative(ClosureModel::markov, 1.0, frozen, 0.0) - 0.5) <= 1e-15);
  const Complex big(1e3, 0.0);
  CHECK(std::abs(laplace_perturbative(ClosureModel::markov, big, NoiseKernel::ou(1.0, 0.5), 0.0) * big - 1.0) <= 1e-5);
  const Complex p(0.7, 1.3);
  const auto quiet = laplace_perturbative(ClosureModel::non_markov, p, NoiseKernel::ou(1e-14, 0.0), 2.0);
  CHECK(std::abs(quiet - p / (p * p + 2.0)) <= 1e-12);
  const auto lam0 = laplace_perturbative(ClosureModel::non_markov, p, NoiseKernel::ou(1.0, 0.0), 2.0);
  CHECK(std::abs(lam0 - p / (p * p + 2.0 + p * p / (p * p + 2.0))) <= 1e-12);

  bool near = false;
  laplace_perturbative(ClosureModel::markov, Complex(0.0, 1.0), frozen, 0.0, &near);
  CHECK(near);
  laplace_perturbative(ClosureModel::markov, Complex(1.0, 0.0), frozen, 0.0, &near);
  CHECK_FALSE(near);

  const std::vector<Complex> ps{Complex(0.0, 1.0), 1.0, 2.0};
  const auto sol = laplace_perturbative(ClosureModel::markov, ps, frozen, 0.0);
  CHECK(sol.pole_warnings == 1);
  CHECK(sol.values.size() == 3);

  const auto white = laplace_perturbative(ClosureModel::non_markov, p, NoiseKernel::white(0.4, 2.0), 1.0);
  CHECK(std::abs(white - p / (p * p + 0.2 * p + 1.0)) <= 1e-14);
}

TEST_CASE("laplace_dia examples") {
  CHECK(std::abs(laplace_dia(ClosureModel::markov, 0.0, NoiseKernel::ou(1.0, 0.0), 0.0) - 1.0) <= 1e-13);
  const Complex p(0.4, -2.0);
  const auto quad = laplace_dia(ClosureModel::markov, p, NoiseKernel::ou(1.0, 0.0), 0.0);
  CHECK(std::abs(quad - (-p + std::sqrt(p * p + 4.0)) / 2.0) <= 1e-12);

  const auto k = NoiseKernel::ou(1.0, 1.0);
  int used = 0;
  const auto j40 = laplace_dia(ClosureModel::markov, 1.0, k, 0.0, 40);
  const auto j50 = laplace_dia(ClosureModel::markov, 1.0, k, 0.0, 50);
  CHECK(std::abs(j40 - j50) <= 1e-10 * std::abs(j50));
  const auto jauto = laplace_dia(ClosureModel::markov, 1.0, k, 0.0, 0, &used);
  CHECK(used == dia_depth(1.0, k));
  CHECK(std::abs(jauto - laplace_dia(ClosureModel::markov, 1.0, k, 0.0, used + 10)) <= 1e-10 * std::abs(jauto));

  const auto quiet = laplace_dia(ClosureModel::non_markov, p, NoiseKernel::ou(1e-14, 0.5), 3.0);
  CHECK(std::abs(quiet - p / (p * p + 3.0)) <= 1e-12);

  const auto white = laplace_dia(ClosureModel::markov, p, NoiseKernel::white(1.0, 2.0), 0.0);
  CHECK(std::abs(white - 1.0 / (p + 0.5)) <= 1e-14);
}

TEST_CASE("dia_depth policy") {
  const auto k = NoiseKernel::ou(1.0, 0.5);
  CHECK(dia_depth(0.0, k) == 2000);
  CHECK(dia_depth(Complex(999.9, 5.0), k) == 1);
  CHECK(dia_depth(Complex(2000.0, 0.0), k) == 1);
  CHECK(dia_depth(Complex(0.0, 0.0), NoiseKernel::ou(4.0, 1.0)) == 2000);
}

TEST_CASE("property: DIA shift identity") {
  std::vector<Complex> ps;
  for (double re : {0.05, 0.5, 2.0})
    for (double im = -20.0; im <= 20.0; im += 2.5) ps.emplace_back(re, im);
  for (auto model : {ClosureModel::markov, ClosureModel::non_markov})
    for (double lambda : {0.1, 1.0, 5.0}) {
      const double nu = model == ClosureModel::markov ? 0.0 : 1.0;
      const auto k = NoiseKernel::ou(1.0, lambda);
      double worst = 0.0;
      for (const Complex& p : ps) {
        const Complex j = laplace_dia(model, p, k, nu);
        const Complex shifted = laplace_dia(model, p + lambda, k, nu);
        const Complex free = model == ClosureModel::markov ? p : p + nu / p;
        worst = std::max(worst, std::abs(j * (free + shifted) - 1.0));
      }
      CAPTURE(lambda);
      CHECK(worst <= 1e-9);
    }
}

TEST_CASE("property: transforms approach 1/p") {
  std::vector<Complex> ps;
  for (double x : {1.0, 10.0, 100.0, 1e4, 1e5}) ps.emplace_back(x, 0.5 * x);
  const auto k = NoiseKernel::tsallis(1.0, 0.5, QIndex(1.2));
  CHECK(asymptote_residual(laplace_perturbative(ClosureModel::non_markov, ps, k, 1.0)) <= 1e-4);
  const auto dia = laplace_dia(ClosureModel::markov, ps, k, 0.0);
  CHECK(asymptote_residual(dia) <= 1e-4);
  for (int d : dia.depth) CHECK(d >= 1);
  CHECK_THROWS_AS(asymptote_residual(LaplaceSolution{}), DomainError);
}

TEST_CASE("green_transform shifts markov by nu") {
  const auto k = NoiseKernel::ou(1.0, 0.5);
  const auto prob = problem(ClosureModel::markov, ClosureMethod::perturbative, k, 0.4);
  const Complex p(1.0, 2.0);
  CHECK(std::abs(green_transform(prob)(p) - laplace_perturbative(ClosureModel::markov, p + 0.4, k, 0.0)) <= 1e-15);
  const auto nm = problem(ClosureModel::non_markov, ClosureMethod::dia, k, 0.4);
  CHECK(std::abs(green_transform(nm)(p) - laplace_dia(ClosureModel::non_markov, p, k, 0.4)) <= 1e-15);
}

TEST_CASE("laplace_inverted_green grid") {
  const TimeGrid g = TimeGrid::covering(0.01, 2.0);
  const auto prob = problem(ClosureModel::markov, ClosureMethod::perturbative, NoiseKernel::ou(1.0, 0.0), 0.0);
  const auto sol = laplace_inverted_green(prob, g, {}, 10);
  CHECK(sol.grid == TimeGrid(0.1, 20));
  CHECK(sol.values[0] == std::complex<double>(1.0, 0.0));
  CHECK(sol.values[10].real() == Approx(std::cos(1.0)).epsilon(1e-8));
  CHECK_THROWS_AS(laplace_inverted_green(prob, g, {}, 0), DomainError);
  CHECK_THROWS_AS(laplace_inverted_green(prob, g, {}, 500), DomainError);
}

TEST_CASE("white_noise_solution") {
  CHECK(white_noise_solution(ClosureModel::markov, 2.0, 2.0, 0.0, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(white_noise_solution(ClosureModel::markov, 2.0, 2.0, 0.5, 1.0) == Approx(std::exp(-1.5)).epsilon(1e-15));
  for (double t : {0.5, 1.0, 4.0})
    CHECK(white_noise_solution(ClosureModel::non_markov, 1e-14, 1.0, 2.0, t) == Approx(std::cos(std::sqrt(2.0) * t)).epsilon(1e-10));
  CHECK_THROWS_AS(white_noise_solution(ClosureModel::markov, 1.0, 0.0, 0.0, 1.0), DomainError);

  // underdamped, overdamped and critical branches
  for (auto [b, nu] : {std::pair{0.2, 1.0}, std::pair{3.0, 1.0}, std::pair{2.0, 1.0}}) {
    const Transform F = [b = b, nu = nu](Complex p) { return p / (p * p + b * p + nu); };
    for (double t : {0.3, 1.0, 2.5, 6.0}) {
      const double w = white_noise_solution(ClosureModel::non_markov, b, 1.0, nu, t);
      CAPTURE(b);
      CAPTURE(t);
      CHECK(std::abs(w - invert_laplace(F, t)) <= 1e-7);
      CHECK(std::abs(w - oracle::damped_oscillator(t, b, nu)) <= 1e-9);
    }
  }
}

TEST_CASE("large_time_solution") {
  for (double t : {0.0, 1.0, 7.5})
    CHECK(large_time_solution(ClosureModel::markov, 1.5, 3.0, 0.2, t) == white_noise_solution(ClosureModel::markov, 1.5, 3.0, 0.2, t));
  CHECK(large_time_solution(ClosureModel::non_markov, 1.0, 1.0, 1.0, 2.0 * std::numbers::pi) == Approx(1.0).epsilon(1e-15));
  const Transform F = [](Complex p) { return p / (p * p + 1.0); };
  double worst = 0.0;
  for (double t = 0.5; t <= 20.0; t += 0.5)
    worst = std::max(worst, std::abs(large_time_solution(ClosureModel::non_markov, 1.0, 1.0, 1.0, t) - invert_laplace(F, t)));
  CHECK(worst <= 1e-7);
}

TEST_CASE("write_laplace_csv") {
  const auto file = std::filesystem::temp_directory_path() / "tsdia_laplace_test.csv";
  const std::vector<Complex> ps{1.0, Complex(2.0, 1.0)};
  write_laplace_csv(laplace_dia(ClosureModel::markov, ps, NoiseKernel::ou(1.0, 1.0), 0.0), file, {"x: 1"});
  std::ifstream is(file);
  std::string line;
  std::getline(is, line);
  CHECK(line == "# x: 1");
  std::getline(is, line);
  CHECK(line == "re_p,im_p,re_val,im_val,depth");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 2);
  std::filesystem::remove(file);
}
