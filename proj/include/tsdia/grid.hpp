#pragma once

#include <Eigen/Core>

#include "tsdia/errors.hpp"

namespace tsdia {

/// Uniform time grid t_i = i * dt, i = 0..n.
class TimeGrid {
 public:
  TimeGrid(double dt, int n) : dt_(dt), n_(n) {
    if (!(dt > 0.0) || n < 1) throw DomainError("TimeGrid requires dt > 0 and n >= 1");
  }

  /// Grid covering [0, t_max] with step dt (n = round(t_max / dt)).
  static TimeGrid covering(double dt, double t_max);

  double dt() const { return dt_; }
  int steps() const { return n_; }
  int size() const { return n_ + 1; }
  double node(int i) const { return dt_ * i; }
  double t_max() const { return dt_ * n_; }
  Eigen::VectorXd nodes() const;

  bool operator==(const TimeGrid& other) const { return dt_ == other.dt_ && n_ == other.n_; }

 private:
  double dt_;
  int n_;
};

}  // namespace tsdia
