#include "tsdia/closures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace tsdia {

const char* to_string(ClosureModel model) { return model == ClosureModel::markov ? "markov" : "non-markov"; }

const char* to_string(ClosureMethod method) { return method == ClosureMethod::perturbative ? "perturbative" : "dia"; }

ClosureModel closure_model_from_string(const std::string& name) {
  if (name == "markov") return ClosureModel::markov;
  if (name == "non-markov") return ClosureModel::non_markov;
  throw DomainError("unknown closure model '" + name + "'");
}

ClosureMethod closure_method_from_string(const std::string& name) {
  if (name == "perturbative") return ClosureMethod::perturbative;
  if (name == "dia") return ClosureMethod::dia;
  throw DomainError("unknown closure method '" + name + "'");
}

void ClosureProblem::validate() const {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("closure nu must be finite and >= 0");
}

namespace {

std::string label_of(const ClosureProblem& prob, const char* domain) {
  return std::string(domain) + "/" + to_string(prob.model) + "/" + to_string(prob.method);
}

// Product-trapezoidal stepping of
//   y' = -nu_int * int_0^t y - int_0^t W(t - s) M(t - s) y(s) ds,  y(0) = 1,
// with M = 1 (linear) or M = y (self-consistent). The trapezoidal ODE rule and trapezoidal
// convolution leave the new node value entering linearly, so each step is one scalar division.
Eigen::VectorXd step_volterra(const Eigen::VectorXd& w, double nu_int, bool self_consistent, double dt) {
  const Eigen::Index n = w.size() - 1;
  Eigen::VectorXd y(n + 1);
  y[0] = 1.0;
  double q = 0.0;       // trapezoidal int_0^{t_{k}} y
  double f_prev = 0.0;  // right-hand side at t_{k}; zero at t = 0
  const double h = 0.5 * dt;
  for (Eigen::Index k = 1; k <= n; ++k) {
    double interior = 0.0;
    if (self_consistent) {
      for (Eigen::Index j = 1; j < k; ++j) interior += w[k - j] * y[k - j] * y[j];
    } else {
      for (Eigen::Index j = 1; j < k; ++j) interior += w[k - j] * y[j];
    }
    double known = -dt * interior;  // constant part of the convolution term, sign included
    double coeff = 0.0;             // coefficient of y_k in f_k
    if (self_consistent) {
      coeff -= h * y[0] * (w[k] + w[0]);
    } else {
      known -= h * w[k] * y[0];
      coeff -= h * w[0];
    }
    known -= nu_int * (q + h * y[k - 1]);
    coeff -= nu_int * h;

    const double denom = 1.0 - h * coeff;
    if (std::abs(denom) < 1e-14) {
      std::ostringstream os;
      os << "singular Volterra step at node " << k << " (t = " << k * dt << ")";
      throw NumericalError(os.str());
    }
    y[k] = (y[k - 1] + h * (f_prev + known)) / denom;
    if (!std::isfinite(y[k])) {
      std::ostringstream os;
      os << "Volterra solution diverged at node " << k << " (t = " << k * dt << ")";
      throw NumericalError(os.str());
    }
    f_prev = known + coeff * y[k];
    q += h * (y[k - 1] + y[k]);
  }
  return y;
}

GreenFunction solve_volterra(const ClosureProblem& prob, const TimeGrid& grid, bool self_consistent) {
  prob.validate();
  if (!prob.kernel.pointwise())
    throw DomainError("white-noise kernel admits closed-form solving only; use closed_form_green");
  const int n = grid.steps();
  Eigen::VectorXd w(n + 1);
  const double omega = std::sqrt(prob.nu);
  for (int k = 0; k <= n; ++k) {
    const double t = grid.node(k);
    w[k] = prob.kernel(t);
    if (prob.model == ClosureModel::non_markov && !self_consistent) w[k] *= std::cos(omega * t);
  }
  const double nu_int = prob.model == ClosureModel::non_markov ? prob.nu : 0.0;
  const Eigen::VectorXd y = step_volterra(w, nu_int, self_consistent, grid.dt());

  GreenFunction out{grid, Eigen::VectorXcd::Zero(grid.size()), std::nullopt, Provenance::closure,
                    label_of(prob, "volterra")};
  out.values.real() = y;
  if (prob.model == ClosureModel::markov) {
    for (int k = 0; k <= n; ++k) out.values[k] *= std::exp(-prob.nu * grid.node(k));
  }
  out.values[0] = 1.0;
  return out;
}

}  // namespace

GreenFunction volterra_perturbative(const ClosureProblem& prob, const TimeGrid& grid) {
  return solve_volterra(prob, grid, false);
}

GreenFunction volterra_dia(const ClosureProblem& prob, const TimeGrid& grid) { return solve_volterra(prob, grid, true); }

GreenFunction solve_time_domain(const ClosureProblem& prob, const TimeGrid& grid) {
  if (!prob.kernel.pointwise()) return closed_form_green(prob, grid);
  return prob.method == ClosureMethod::perturbative ? volterra_perturbative(prob, grid) : volterra_dia(prob, grid);
}

Complex laplace_perturbative(ClosureModel model, Complex p, const NoiseKernel& kernel, double nu, bool* near_pole) {
  const double s2 = kernel.sigma_b2();
  const double lambda = kernel.lambda0();
  Complex den;
  bool pole = false;
  if (model == ClosureModel::markov) {
    if (!kernel.pointwise()) {
      den = p + s2 / lambda;
    } else {
      pole = std::abs(p + lambda) < kPoleWarning;
      den = p + s2 / (p + lambda);
    }
  } else {
    pole = std::abs(p) < kPoleWarning;
    if (!kernel.pointwise()) {
      den = p + nu / p + s2 / lambda;
    } else {
      const Complex shifted = p + lambda;
      const Complex inner = shifted * shifted + nu;
      pole = pole || std::abs(inner) < kPoleWarning;
      den = p + nu / p + s2 * shifted / inner;
    }
  }
  pole = pole || std::abs(den) < kPoleWarning;
  if (near_pole) *near_pole = pole;
  return 1.0 / den;
}

LaplaceSolution laplace_perturbative(ClosureModel model, std::span<const Complex> p, const NoiseKernel& kernel,
                                     double nu) {
  LaplaceSolution sol;
  for (const Complex& x : p) {
    bool pole = false;
    sol.abscissae.push_back(x);
    sol.values.push_back(laplace_perturbative(model, x, kernel, nu, &pole));
    sol.depth.push_back(1);
    sol.pole_warnings += pole ? 1 : 0;
  }
  return sol;
}

int dia_depth(Complex p, const NoiseKernel& kernel) {
  const double lambda = kernel.lambda0();
  if (!(lambda > 0.0)) return 1;
  const double sigma = std::sqrt(kernel.sigma_b2());
  return std::max(1, static_cast<int>(std::ceil((1e3 * sigma - p.real()) / lambda)));
}

namespace {

Complex free_part(ClosureModel model, Complex p, double nu) {
  return model == ClosureModel::markov ? p : p + nu / p;
}

Complex dia_fixed_point(ClosureModel model, Complex p, double s2, double nu) {
  const Complex s = free_part(model, p, nu);
  const double sigma = std::sqrt(s2);
  Complex x = std::abs(s) > 2.0 * sigma ? 1.0 / s : Complex(1.0 / sigma, 0.0);
  constexpr double damping = 0.5;
  for (int it = 0; it < 100000; ++it) {
    const Complex next = (1.0 - damping) * x + damping / (s + s2 * x);
    if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
    if (std::abs(next - x) <= 1e-14 * std::abs(next)) return next;
    x = next;
  }
  std::ostringstream os;
  os << "DIA fixed-point iteration diverged at p = " << p;
  throw NumericalError(os.str());
}

}  // namespace

Complex laplace_dia(ClosureModel model, Complex p, const NoiseKernel& kernel, double nu, int depth, int* used_depth) {
  const double s2 = kernel.sigma_b2();
  const double lambda = kernel.lambda0();
  if (!kernel.pointwise()) {
    if (used_depth) *used_depth = 1;
    // delta kernel: the memory integral collapses to (sigma^2/lambda) G(0) G(t)
    return laplace_perturbative(model, p, kernel, nu);
  }
  if (!(lambda > 0.0)) {
    if (used_depth) *used_depth = 1;
    return dia_fixed_point(model, p, s2, nu);
  }
  const int d = depth > 0 ? depth : dia_depth(p, kernel);
  if (used_depth) *used_depth = d;
  Complex x = 1.0 / free_part(model, p + static_cast<double>(d) * lambda, nu);
  for (int k = d - 1; k >= 0; --k) x = 1.0 / (free_part(model, p + static_cast<double>(k) * lambda, nu) + s2 * x);
  return x;
}

LaplaceSolution laplace_dia(ClosureModel model, std::span<const Complex> p, const NoiseKernel& kernel, double nu,
                            int depth) {
  LaplaceSolution sol;
  for (const Complex& x : p) {
    int used = 0;
    sol.abscissae.push_back(x);
    sol.values.push_back(laplace_dia(model, x, kernel, nu, depth, &used));
    sol.depth.push_back(used);
  }
  return sol;
}

Transform green_transform(const ClosureProblem& prob) {
  prob.validate();
  const double shift = prob.model == ClosureModel::markov ? prob.nu : 0.0;
  if (prob.method == ClosureMethod::perturbative) {
    return [prob, shift](Complex p) { return laplace_perturbative(prob.model, p + shift, prob.kernel, prob.nu); };
  }
  return [prob, shift](Complex p) { return laplace_dia(prob.model, p + shift, prob.kernel, prob.nu); };
}

GreenFunction laplace_inverted_green(const ClosureProblem& prob, const TimeGrid& grid, const InversionOptions& opts,
                                     int stride) {
  if (stride < 1 || stride > grid.steps()) throw DomainError("inversion stride out of range");
  const TimeGrid coarse(grid.dt() * stride, grid.steps() / stride);
  const Transform F = green_transform(prob);
  GreenFunction out{coarse, Eigen::VectorXcd::Zero(coarse.size()), std::nullopt, Provenance::closure,
                    label_of(prob, "laplace")};
  out.values[0] = 1.0;
  for (int i = 1; i < coarse.size(); ++i) out.values[i] = invert_laplace(F, grid.node(i * stride), opts);
  return out;
}

double white_noise_solution(ClosureModel model, double sigma_b2, double lambda0, double nu, double t) {
  if (!(lambda0 > 0.0)) throw DomainError("white-noise solution needs lambda0 > 0");
  const double b = sigma_b2 / lambda0;
  if (model == ClosureModel::markov) return std::exp(-(nu + b) * t);
  const double disc = nu - 0.25 * b * b;
  const double decay = std::exp(-0.5 * b * t);
  if (disc > 0.0) {
    const double w = std::sqrt(disc);
    return decay * (std::cos(w * t) - b / (2.0 * w) * std::sin(w * t));
  }
  if (disc < 0.0) {
    const double k = std::sqrt(-disc);
    return decay * (std::cosh(k * t) - b / (2.0 * k) * std::sinh(k * t));
  }
  return decay * (1.0 - 0.5 * b * t);
}

double large_time_solution(ClosureModel model, double sigma_b2, double lambda0, double nu, double t) {
  if (model == ClosureModel::markov) return white_noise_solution(model, sigma_b2, lambda0, nu, t);
  return std::cos(std::sqrt(nu) * t);
}

GreenFunction closed_form_green(const ClosureProblem& prob, const TimeGrid& grid) {
  prob.validate();
  GreenFunction out{grid, Eigen::VectorXcd::Zero(grid.size()), std::nullopt, Provenance::closure,
                    label_of(prob, "white-noise")};
  for (int i = 0; i < grid.size(); ++i)
    out.values[i] =
        white_noise_solution(prob.model, prob.kernel.sigma_b2(), prob.kernel.lambda0(), prob.nu, grid.node(i));
  out.values[0] = 1.0;
  return out;
}

void write_laplace_csv(const LaplaceSolution& sol, const std::filesystem::path& file,
                       const std::vector<std::string>& preamble) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os.precision(17);
  for (const auto& line : preamble) os << "# " << line << '\n';
  os << "re_p,im_p,re_val,im_val,depth\n";
  for (std::size_t i = 0; i < sol.values.size(); ++i) {
    os << sol.abscissae[i].real() << ',' << sol.abscissae[i].imag() << ',' << sol.values[i].real() << ','
       << sol.values[i].imag() << ',' << sol.depth[i] << '\n';
  }
}

double asymptote_residual(const LaplaceSolution& sol) {
  if (sol.values.size() < 2) throw DomainError("asymptote check needs at least two abscissae");
  std::vector<std::size_t> idx(sol.values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(sol.abscissae[a]) > std::abs(sol.abscissae[b]);
  });
  double worst = 0.0;
  for (int k = 0; k < 2; ++k) {
    const std::size_t i = idx[k];
    worst = std::max(worst, std::abs(sol.abscissae[i] * sol.values[i] - 1.0));
  }
  return worst;
}

}  // namespace tsdia
