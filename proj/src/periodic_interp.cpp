#include "lppv/periodic_interp.hpp"

#include <cmath>
#include <vector>

#include "lppv/errors.hpp"

namespace lppv {

PeriodicInterpolant::PeriodicInterpolant(double period, const Mat& values) {
  const int M = static_cast<int>(values.rows());
  const int n = static_cast<int>(values.cols());
  if (!(period > 0.0) || !std::isfinite(period))
    throw Error(errc::config, "interpolation period must be positive");
  if (M < 2) throw Error(errc::config, "need at least 2 samples per period");

  period_ = period;
  grid_size_ = M;
  has_nyquist_ = (M % 2 == 0);
  const int K = M / 2;  // highest retained mode (Nyquist when M even)
  a_ = Mat::Zero(K + 1, n);
  b_ = Mat::Zero(K + 1, n);

  // Exact angle table: cos/sin of 2*pi*r/M for r = 0..M-1.  Index products
  // k*m are reduced mod M so no large-angle evaluation ever happens.
  std::vector<double> ct(M), st(M);
  for (int r = 0; r < M; ++r) {
    const double ang = 2.0 * M_PI * r / M;
    ct[r] = std::cos(ang);
    st[r] = std::sin(ang);
  }

  for (int k = 0; k <= K; ++k) {
    const double scale =
        (k == 0 || (has_nyquist_ && k == K)) ? 1.0 / M : 2.0 / M;
    for (int m = 0; m < M; ++m) {
      const int r = static_cast<int>((static_cast<long>(k) * m) % M);
      for (int j = 0; j < n; ++j) {
        a_(k, j) += scale * values(m, j) * ct[r];
        b_(k, j) += scale * values(m, j) * st[r];
      }
    }
  }
  b_.row(0).setZero();
  if (has_nyquist_) b_.row(K).setZero();  // sine vanishes on the grid
}

Vec PeriodicInterpolant::eval(double tau) const {
  if (empty()) throw Error(errc::numerical, "empty interpolant evaluated");
  const int K = static_cast<int>(a_.rows()) - 1;
  const int n = funcs();
  const double phi = 2.0 * M_PI * tau / period_;
  const double cphi = std::cos(phi), sphi = std::sin(phi);

  Vec out = a_.row(0).transpose();
  double ck = 1.0, sk = 0.0;  // cos(k*phi), sin(k*phi)
  for (int k = 1; k <= K; ++k) {
    const double c = ck * cphi - sk * sphi;
    const double s = sk * cphi + ck * sphi;
    ck = c;
    sk = s;
    for (int j = 0; j < n; ++j) out(j) += a_(k, j) * ck + b_(k, j) * sk;
  }
  return out;
}

Vec PeriodicInterpolant::deriv(double tau) const {
  if (empty()) throw Error(errc::numerical, "empty interpolant evaluated");
  const int K = static_cast<int>(a_.rows()) - 1;
  const int n = funcs();
  const double w = 2.0 * M_PI / period_;
  const double cphi = std::cos(w * tau), sphi = std::sin(w * tau);

  Vec out = Vec::Zero(n);
  double ck = 1.0, sk = 0.0;
  for (int k = 1; k <= K; ++k) {
    const double c = ck * cphi - sk * sphi;
    const double s = sk * cphi + ck * sphi;
    ck = c;
    sk = s;
    const double kw = k * w;
    for (int j = 0; j < n; ++j)
      out(j) += kw * (-a_(k, j) * sk + b_(k, j) * ck);
  }
  return out;
}

}  // namespace lppv
