#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tsdia/grid.hpp"
#include "tsdia/kernels.hpp"
#include "tsdia/laplace.hpp"
#include "tsdia/oscillator.hpp"

namespace tsdia {

enum class ClosureModel { markov, non_markov };
enum class ClosureMethod { perturbative, dia };

const char* to_string(ClosureModel model);
const char* to_string(ClosureMethod method);
ClosureModel closure_model_from_string(const std::string& name);
ClosureMethod closure_method_from_string(const std::string& name);

/// A closure equation for the averaged Green's function. nu is a rate for markov and a
/// rate squared for non-markov.
struct ClosureProblem {
  ClosureModel model = ClosureModel::markov;
  ClosureMethod method = ClosureMethod::perturbative;
  NoiseKernel kernel = NoiseKernel::ou(1.0, 0.0);
  double nu = 0.0;

  void validate() const;
};

/// Linear Volterra integro-differential closure, product-trapezoidal stepping.
/// Markov: J' + int K(t-s) J(s) ds = 0 with G = e^{-nu t} J.
/// Non-markov: G' + nu int G + int K(t-s) cos(sqrt(nu)(t-s)) G(s) ds = 0.
GreenFunction volterra_perturbative(const ClosureProblem& prob, const TimeGrid& grid);

/// DIA closure: the bare propagator inside the memory integral is replaced by the unknown.
/// Each step solves the scalar linear equation in the new node value.
GreenFunction volterra_dia(const ClosureProblem& prob, const TimeGrid& grid);

/// Dispatches on prob.method; the white kernel goes to the closed-form white-noise solution.
GreenFunction solve_time_domain(const ClosureProblem& prob, const TimeGrid& grid);

struct LaplaceSolution {
  std::vector<Complex> abscissae;
  std::vector<Complex> values;
  std::vector<int> depth;
  int pole_warnings = 0;
};

/// Pole-proximity threshold on |denominator| for the closed forms.
inline constexpr double kPoleWarning = 1e-12;

/// Closed-form perturbative transform. Markov returns J(p) = 1/(p + sigma^2/(p + lambda));
/// non-markov returns G(p) = 1/(p + nu/p + sigma^2 (p+lambda)/((p+lambda)^2 + nu)).
/// For the white kernel the delta forms 1/(p + sigma^2/lambda) and p/(p^2 + (sigma^2/lambda) p + nu).
Complex laplace_perturbative(ClosureModel model, Complex p, const NoiseKernel& kernel, double nu,
                             bool* near_pole = nullptr);

LaplaceSolution laplace_perturbative(ClosureModel model, std::span<const Complex> p, const NoiseKernel& kernel,
                                     double nu);

/// Truncation depth ceil((1e3 sigma - Re p)/lambda), at least 1.
int dia_depth(Complex p, const NoiseKernel& kernel);

/// DIA transform from the shifted recursions J(p) = 1/(p + sigma^2 J(p + lambda)) (markov) and
/// G(p) = 1/(p + nu/p + sigma^2 G(p + lambda)) (non-markov), seeded with the free solution at `depth`.
/// depth <= 0 selects dia_depth(p). lambda = 0 solves the fixed point directly with damping.
Complex laplace_dia(ClosureModel model, Complex p, const NoiseKernel& kernel, double nu, int depth = 0,
                    int* used_depth = nullptr);

LaplaceSolution laplace_dia(ClosureModel model, std::span<const Complex> p, const NoiseKernel& kernel, double nu,
                            int depth = 0);

/// Transform of the averaged Green's function G for a problem (markov: J(p + nu)).
Transform green_transform(const ClosureProblem& prob);

/// G(t) by numerical inversion of green_transform; G(0) = 1. With `stride` > 1 the result lives on
/// the coarser grid (dt * stride, steps / stride).
GreenFunction laplace_inverted_green(const ClosureProblem& prob, const TimeGrid& grid,
                                     const InversionOptions& opts = {}, int stride = 1);

/// White-noise (large lambda) closed forms. Markov: e^{-(nu + sigma_b2/lambda0) t}.
/// Non-markov: exact inverse of p/(p^2 + b p + nu), b = sigma_b2/lambda0.
double white_noise_solution(ClosureModel model, double sigma_b2, double lambda0, double nu, double t);

/// Large-time forms: markov as white_noise_solution, non-markov cos(sqrt(nu) t).
double large_time_solution(ClosureModel model, double sigma_b2, double lambda0, double nu, double t);

GreenFunction closed_form_green(const ClosureProblem& prob, const TimeGrid& grid);

/// `re_p,im_p,re_val,im_val,depth`.
void write_laplace_csv(const LaplaceSolution& sol, const std::filesystem::path& file,
                       const std::vector<std::string>& preamble = {});

/// Checks |p F(p) - 1| on the two largest-modulus abscissae; returns the larger residual.
double asymptote_residual(const LaplaceSolution& sol);

}  // namespace tsdia
