#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>

#include "tsdia/errors.hpp"

namespace tsdia {

/// Entropic index q together with ell = 1 - q.
class QIndex {
 public:
  /// Below this |1 - q| the exact exponential/logarithm branch is used.
  static constexpr double kExtensiveWindow = 1e-8;

  QIndex() = default;
  explicit QIndex(double q) : q_(q), ell_(1.0 - q) {
    if (!std::isfinite(q)) throw DomainError("q must be finite");
  }

  double q() const { return q_; }
  double ell() const { return ell_; }
  bool extensive() const { return std::abs(ell_) < kExtensiveWindow; }

 private:
  double q_ = 1.0;
  double ell_ = 0.0;
};

/// q-exponential [1 + (1-q) x]^{1/(1-q)}, cut off to 0 where the base is not positive.
template <typename Scalar>
Scalar q_exp(Scalar x, const QIndex& q) {
  using std::exp;
  using std::log1p;
  if (q.extensive()) return exp(x);
  const Scalar ell = Scalar(q.ell());
  const Scalar u = ell * x;
  if (!(Scalar(1) + u > Scalar(0))) return Scalar(0);
  return exp(log1p(u) / ell);
}

/// q-logarithm (x^{1-q} - 1)/(1-q); inverse of q_exp on its range.
template <typename Scalar>
Scalar q_log(Scalar x, const QIndex& q) {
  using std::expm1;
  using std::log;
  if (!(x > Scalar(0))) throw DomainError("q_log requires x > 0");
  if (q.extensive()) return log(x);
  const Scalar ell = Scalar(q.ell());
  return expm1(ell * log(x)) / ell;
}

/// Probabilities p_i >= 0 summing to one (tolerance 1e-12).
class DiscreteDistribution {
 public:
  static constexpr double kNormalizationTolerance = 1e-12;

  explicit DiscreteDistribution(Eigen::VectorXd p);

  /// Normalizes nonnegative weights; throws when they sum to zero.
  static DiscreteDistribution from_weights(const Eigen::Ref<const Eigen::VectorXd>& w);
  static DiscreteDistribution uniform(Eigen::Index states);

  const Eigen::VectorXd& probabilities() const { return p_; }
  Eigen::Index size() const { return p_.size(); }
  double operator[](Eigen::Index i) const { return p_[i]; }

 private:
  struct Unchecked {};
  DiscreteDistribution(Eigen::VectorXd p, Unchecked) : p_(std::move(p)) {}

  Eigen::VectorXd p_;
};

/// S_q = (1 - sum p_i^q)/(q - 1), evaluated as the mean q-surprise sum p_i ln_q(1/p_i).
/// Zero-probability states contribute nothing. k_B = 1.
double tsallis_entropy(const DiscreteDistribution& d, const QIndex& q);

/// Boltzmann-Gibbs entropy -sum p_i ln p_i.
double bg_entropy(const DiscreteDistribution& d);

/// Escort distribution P_i = p_i^q / sum_j p_j^q.
DiscreteDistribution escort_probabilities(const DiscreteDistribution& d, const QIndex& q);

/// Maximum-entropy distribution p_i proportional to e_q^{-beta E_i}; states whose base
/// 1 - (1-q) beta E_i is not positive get zero weight. Throws DomainError if all states are cut.
DiscreteDistribution maxent_distribution(const Eigen::Ref<const Eigen::VectorXd>& energies, double beta,
                                         const QIndex& q);

/// Partition value Z_q = sum_i e_q^{-beta E_i} (unnormalized weights).
double partition_value(const Eigen::Ref<const Eigen::VectorXd>& energies, double beta, const QIndex& q);

/// Product distribution p_{ij} = a_i b_j, flattened row-major.
DiscreteDistribution product_distribution(const DiscreteDistribution& a, const DiscreteDistribution& b);

}  // namespace tsdia
