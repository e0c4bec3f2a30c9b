#include "tsdia/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tsdia/errors.hpp"

namespace tsdia {

namespace {

constexpr unsigned kMaxDepth = 15;

void check(const QuadratureResult& r, double l1, double abs_tol, double rel_tol, const char* what, double a,
           double b) {
  if (!std::isfinite(r.value) || r.error > std::max(abs_tol, rel_tol * l1)) {
    std::ostringstream os;
    os << what << " did not converge on [" << a << ", " << b << "]: value " << r.value << ", error estimate "
       << r.error;
    throw NumericalError(os.str());
  }
}

}  // namespace

QuadratureResult integrate(const RealFunction& f, double a, double b, double abs_tol, double rel_tol) {
  QuadratureResult r;
  if (a == b) return r;
  double l1 = 0.0;
  r.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, kMaxDepth, rel_tol, &r.error, &l1);
  check(r, l1, abs_tol, rel_tol, "Gauss-Kronrod quadrature", a, b);
  return r;
}

QuadratureResult integrate_piecewise(const RealFunction& f, const std::vector<double>& breakpoints, double abs_tol,
                                     double rel_tol) {
  QuadratureResult total;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    const auto piece = integrate(f, breakpoints[i], breakpoints[i + 1], abs_tol, rel_tol);
    total.value += piece.value;
    total.error += piece.error;
  }
  return total;
}

QuadratureResult integrate_endpoint_singular(const RealFunction& f, double a, double b, double abs_tol) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  QuadratureResult r;
  double l1 = 0.0;
  r.value = integrator.integrate(f, a, b, std::sqrt(std::numeric_limits<double>::epsilon()) * 1e-4, &r.error, &l1);
  check(r, l1, abs_tol, 1e-12, "tanh-sinh quadrature", a, b);
  return r;
}

QuadratureResult integrate_to_infinity(const RealFunction& f, double a, double abs_tol) {
  boost::math::quadrature::exp_sinh<double> integrator;
  QuadratureResult r;
  double l1 = 0.0;
  r.value = integrator.integrate(f, a, std::numeric_limits<double>::infinity(),
                                 std::sqrt(std::numeric_limits<double>::epsilon()) * 1e-4, &r.error, &l1);
  check(r, l1, abs_tol, 1e-12, "exp-sinh quadrature", a, std::numeric_limits<double>::infinity());
  return r;
}

}  // namespace tsdia
