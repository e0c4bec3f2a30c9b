#include "tsdia/qcore.hpp"

#include <cmath>
#include <sstream>

namespace tsdia {

DiscreteDistribution::DiscreteDistribution(Eigen::VectorXd p) : p_(std::move(p)) {
  if (p_.size() < 1) throw DomainError("distribution needs at least one state");
  for (Eigen::Index i = 0; i < p_.size(); ++i) {
    if (!(p_[i] >= 0.0) || !std::isfinite(p_[i])) {
      std::ostringstream os;
      os << "probability " << i << " is invalid: " << p_[i];
      throw DomainError(os.str());
    }
  }
  const double total = p_.sum();
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities sum to " << total;
    throw DomainError(os.str());
  }
}

DiscreteDistribution DiscreteDistribution::from_weights(const Eigen::Ref<const Eigen::VectorXd>& w) {
  if (w.size() < 1) throw DomainError("distribution needs at least one state");
  if ((w.array() < 0.0).any() || !w.allFinite()) throw DomainError("weights must be finite and nonnegative");
  const double total = w.sum();
  if (!(total > 0.0)) throw DomainError("all weights are zero");
  return DiscreteDistribution(Eigen::VectorXd(w / total), Unchecked{});
}

DiscreteDistribution DiscreteDistribution::uniform(Eigen::Index states) {
  if (states < 1) throw DomainError("distribution needs at least one state");
  return DiscreteDistribution(Eigen::VectorXd::Constant(states, 1.0 / static_cast<double>(states)), Unchecked{});
}

double tsallis_entropy(const DiscreteDistribution& d, const QIndex& q) {
  if (q.extensive()) return bg_entropy(d);
  double s = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double p = d[i];
    if (p > 0.0) s += p * q_log(1.0 / p, q);
  }
  return s;
}

double bg_entropy(const DiscreteDistribution& d) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double p = d[i];
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

DiscreteDistribution escort_probabilities(const DiscreteDistribution& d, const QIndex& q) {
  // Weights p_i^q relative to the largest probability, so tiny p and large q do not underflow together.
  const double pmax = d.probabilities().maxCoeff();
  if (!(pmax > 0.0)) throw DomainError("escort distribution of an all-zero vector");
  Eigen::VectorXd w(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    w[i] = d[i] > 0.0 ? std::exp(q.q() * std::log(d[i] / pmax)) : 0.0;
  }
  return DiscreteDistribution::from_weights(w);
}

namespace {

// log e_q^{-beta E}; -inf where the state is cut off.
Eigen::VectorXd log_weights(const Eigen::Ref<const Eigen::VectorXd>& energies, double beta, const QIndex& q) {
  if (!energies.allFinite() || !std::isfinite(beta)) throw DomainError("energies and beta must be finite");
  Eigen::VectorXd lw(energies.size());
  for (Eigen::Index i = 0; i < energies.size(); ++i) {
    const double x = -beta * energies[i];
    if (q.extensive()) {
      lw[i] = x;
    } else {
      const double u = q.ell() * x;
      lw[i] = (1.0 + u > 0.0) ? std::log1p(u) / q.ell() : -std::numeric_limits<double>::infinity();
    }
  }
  return lw;
}

}  // namespace

DiscreteDistribution maxent_distribution(const Eigen::Ref<const Eigen::VectorXd>& energies, double beta,
                                         const QIndex& q) {
  if (energies.size() < 1) throw DomainError("maxent_distribution needs at least one state");
  const Eigen::VectorXd lw = log_weights(energies, beta, q);
  const double top = lw.maxCoeff();
  if (!std::isfinite(top)) {
    if (top > 0.0) throw DomainError("maxent weights overflow (q-exponential diverges)");
    throw DomainError("every state is cut off by the q-exponential support");
  }
  const Eigen::VectorXd w = (lw.array() - top).unaryExpr([](double v) { return std::exp(v); }).matrix();
  return DiscreteDistribution::from_weights(w);
}

double partition_value(const Eigen::Ref<const Eigen::VectorXd>& energies, double beta, const QIndex& q) {
  return log_weights(energies, beta, q).unaryExpr([](double v) { return std::exp(v); }).sum();
}

DiscreteDistribution product_distribution(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  Eigen::VectorXd p(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) p.segment(i * b.size(), b.size()) = a[i] * b.probabilities();
  return DiscreteDistribution::from_weights(p);
}

}  // namespace tsdia
