#pragma once

#include <functional>
#include <vector>

namespace tsdia {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
};

using RealFunction = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (61 point) on [a, b]. Throws NumericalError when the error
/// estimate exceeds max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const RealFunction& f, double a, double b, double abs_tol = 1e-12,
                           double rel_tol = 1e-14);

/// Same, with a partition of breakpoints a = x_0 < x_1 < ... < x_m = b.
QuadratureResult integrate_piecewise(const RealFunction& f, const std::vector<double>& breakpoints,
                                     double abs_tol = 1e-12, double rel_tol = 1e-14);

/// Tanh-sinh on [a, b]; tolerates integrable endpoint singularities.
QuadratureResult integrate_endpoint_singular(const RealFunction& f, double a, double b, double abs_tol = 1e-12);

/// Exp-sinh on [a, inf).
QuadratureResult integrate_to_infinity(const RealFunction& f, double a, double abs_tol = 1e-12);

}  // namespace tsdia
