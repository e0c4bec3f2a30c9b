#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <span>

namespace tsdia {

using Complex = std::complex<double>;
using Transform = std::function<Complex(Complex)>;

enum class InversionMethod {
  /// Fourier series on a Bromwich line with quotient-difference continued-fraction acceleration
  /// (de Hoog, Knight and Stokes). Handles singularities on the imaginary axis.
  de_hoog,
  /// Fixed Talbot contour (Abate-Valko). Accurate only while all singularities stay inside the
  /// contour, whose imaginary-axis crossing is at pi M / (5 t).
  fixed_talbot,
};

struct InversionOptions {
  InversionMethod method = InversionMethod::de_hoog;
  int order = 32;
  /// Second order for the convergence check; 0 disables the check.
  int check_order = 48;
  /// Convergence abscissa: F is analytic for Re p > abscissa.
  double abscissa = 0.0;
  /// de Hoog discretization tolerance (sets the Bromwich line).
  double tolerance = 1e-12;
  /// Allowed |f_order - f_check_order| before NumericalError.
  double agreement = 1e-6;
};

/// Real inverse transform f(t) at each t > 0. Throws NumericalError when the two orders disagree.
Eigen::VectorXd invert_laplace(const Transform& F, std::span<const double> times, const InversionOptions& opts = {});

double invert_laplace(const Transform& F, double t, const InversionOptions& opts = {});

}  // namespace tsdia
