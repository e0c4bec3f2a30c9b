#include "tsdia/laplace.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "tsdia/errors.hpp"

namespace tsdia {

namespace {

using std::numbers::pi;

// de Hoog, Knight & Stokes: trapezoidal Bromwich sum on Re p = gamma with period 2T, accelerated
// by the quotient-difference continued fraction of order 2M.
double de_hoog(const Transform& F, double t, int m, double abscissa, double tol) {
  const double period = 2.0 * t;
  const double gamma = abscissa - std::log(tol) / (2.0 * period);
  const int n = 2 * m + 1;

  std::vector<Complex> a(n);
  for (int k = 0; k < n; ++k) a[k] = F(Complex(gamma, k * pi / period));
  a[0] *= 0.5;

  // e(i, r), q(i, r) stored column-major by r.
  std::vector<Complex> e(static_cast<std::size_t>(n) * (m + 1)), q(static_cast<std::size_t>(n) * (m + 1));
  auto E = [&](int i, int r) -> Complex& { return e[static_cast<std::size_t>(r) * n + i]; };
  auto Q = [&](int i, int r) -> Complex& { return q[static_cast<std::size_t>(r) * n + i]; };
  for (int i = 0; i + 1 < n; ++i) Q(i, 1) = a[i + 1] / a[i];
  for (int r = 1; r <= m; ++r) {
    for (int i = 0; i < n - 2 * r; ++i) E(i, r) = Q(i + 1, r) - Q(i, r) + E(i + 1, r - 1);
    if (r < m)
      for (int i = 0; i < n - 2 * r - 1; ++i) Q(i, r + 1) = Q(i + 1, r) * E(i + 1, r) / E(i, r);
  }

  std::vector<Complex> d(n);
  d[0] = a[0];
  for (int r = 1; r <= m; ++r) {
    d[2 * r - 1] = -Q(0, r);
    d[2 * r] = -E(0, r);
  }

  const Complex z = std::exp(Complex(0.0, pi * t / period));
  // A[k + 1] holds A_k, k = -1 .. n-1.
  std::vector<Complex> A(n + 1), B(n + 1);
  A[0] = 0.0;
  A[1] = d[0];
  B[0] = 1.0;
  B[1] = 1.0;
  for (int k = 1; k < n; ++k) {
    A[k + 1] = A[k] + d[k] * z * A[k - 1];
    B[k + 1] = B[k] + d[k] * z * B[k - 1];
  }
  // Replace the last convergent using the tail estimate.
  const Complex h = 0.5 * (1.0 + (d[n - 2] - d[n - 1]) * z);
  const Complex rem = -h * (1.0 - std::sqrt(1.0 + d[n - 1] * z / (h * h)));
  const Complex an = A[n - 1] + rem * A[n - 2];
  const Complex bn = B[n - 1] + rem * B[n - 2];
  return std::exp(gamma * t) / period * (an / bn).real();
}

// Abate-Valko fixed Talbot contour p(theta) = abscissa + r theta (cot theta + i), r = 2M/(5t).
double fixed_talbot(const Transform& F, double t, int m, double abscissa) {
  const double r = 2.0 * m / (5.0 * t);
  double sum = 0.5 * std::exp(r * t) * F(Complex(abscissa + r, 0.0)).real();
  for (int k = 1; k < m; ++k) {
    const double theta = k * pi / m;
    const double cot = std::cos(theta) / std::sin(theta);
    const Complex p(r * theta * cot, r * theta);
    const double sigma = theta + (theta * cot - 1.0) * cot;
    sum += (std::exp(t * p) * F(p + abscissa) * Complex(1.0, sigma)).real();
  }
  return std::exp(abscissa * t) * r / m * sum;
}

double invert_once(const Transform& F, double t, int order, const InversionOptions& opts) {
  switch (opts.method) {
    case InversionMethod::de_hoog: return de_hoog(F, t, order, opts.abscissa, opts.tolerance);
    case InversionMethod::fixed_talbot: return fixed_talbot(F, t, order, opts.abscissa);
  }
  return std::nan("");
}

}  // namespace

double invert_laplace(const Transform& F, double t, const InversionOptions& opts) {
  if (!(t > 0.0)) throw DomainError("invert_laplace requires t > 0");
  if (opts.order < 2) throw DomainError("invert_laplace order must be at least 2");
  const double f = invert_once(F, t, opts.order, opts);
  if (opts.check_order > 0) {
    const double g = invert_once(F, t, opts.check_order, opts);
    if (!std::isfinite(f) || !(std::abs(f - g) <= opts.agreement * std::max(1.0, std::abs(f)))) {
      std::ostringstream os;
      os.precision(10);
      os << "Laplace inversion did not converge at t = " << t << ": order " << opts.order << " gives " << f
         << ", order " << opts.check_order << " gives " << g;
      throw NumericalError(os.str());
    }
  }
  return f;
}

Eigen::VectorXd invert_laplace(const Transform& F, std::span<const double> times, const InversionOptions& opts) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) out[static_cast<Eigen::Index>(i)] = invert_laplace(F, times[i], opts);
  return out;
}

}  // namespace tsdia
