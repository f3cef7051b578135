#pragma once

#include "lppv/core.hpp"

namespace lppv {

// Trigonometric interpolation of periodic data sampled on a uniform grid
// tau_m = m * period / M, m = 0..M-1.  Interpolates the samples exactly and
// converges spectrally for smooth data, so derivatives of the interpolant
// are accurate enough to serve as ground truth for phase/frame derivatives.
class PeriodicInterpolant {
 public:
  PeriodicInterpolant() = default;
  // `values` is M x n: rows are grid samples of n scalar functions.
  PeriodicInterpolant(double period, const Mat& values);

  Vec eval(double tau) const;
  // Exact derivative of the evaluated interpolant (not of the data).
  Vec deriv(double tau) const;

  int funcs() const { return static_cast<int>(a_.cols()); }
  int grid_size() const { return grid_size_; }
  double period() const { return period_; }
  bool empty() const { return a_.size() == 0; }

 private:
  double period_ = 0.0;
  int grid_size_ = 0;
  bool has_nyquist_ = false;  // M even: highest mode kept as pure cosine
  Mat a_, b_;                 // (K+1) x n Fourier coefficients, k = 0..K
};

}  // namespace lppv
