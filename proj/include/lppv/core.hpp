#pragma once

#include <Eigen/Dense>

namespace lppv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Wrap a phase into [0, period).
inline double wrap_phase(double tau, double period) {
  double w = std::fmod(tau, period);
  if (w < 0.0) w += period;
  // fmod can return exactly `period` after the negative fix-up when
  // tau is a tiny negative number; clamp that back to 0.
  if (w >= period) w = 0.0;
  return w;
}

}  // namespace lppv
