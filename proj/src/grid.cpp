#include "tsdia/grid.hpp"

#include <cmath>

namespace tsdia {

TimeGrid TimeGrid::covering(double dt, double t_max) {
  if (!(dt > 0.0) || !(t_max > 0.0)) throw DomainError("TimeGrid::covering requires dt > 0 and t_max > 0");
  return TimeGrid(dt, static_cast<int>(std::lround(t_max / dt)));
}

Eigen::VectorXd TimeGrid::nodes() const {
  Eigen::VectorXd t(size());
  for (int i = 0; i < size(); ++i) t[i] = node(i);
  return t;
}

}  // namespace tsdia
