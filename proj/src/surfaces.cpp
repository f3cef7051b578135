#include "lppv/surfaces.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "lppv/errors.hpp"

namespace lppv {

namespace {

Vec perp2(const Vec& v) {
  Vec out(2);
  out(0) = -v(1);
  out(1) = v(0);
  return out;
}

Vec cross3(const Vec& a, const Vec& b) {
  Vec out(3);
  out(0) = a(1) * b(2) - a(2) * b(1);
  out(1) = a(2) * b(0) - a(0) * b(2);
  out(2) = a(0) * b(1) - a(1) * b(0);
  return out;
}

// Orthonormalize the rows of P against the unit vector z and each other
// (modified Gram-Schmidt).  Rows are assumed to be near-orthonormal already.
void orthonormalize_rows(Mat& P, const Vec& z) {
  const int rows = static_cast<int>(P.rows());
  for (int i = 0; i < rows; ++i) {
    Vec r = P.row(i).transpose();
    r -= r.dot(z) * z;
    for (int j = 0; j < i; ++j) {
      Vec q = P.row(j).transpose();
      r -= r.dot(q) * q;
    }
    const double nr = r.norm();
    if (nr < 1e-8)
      throw Error(errc::frame_discontinuity,
                  "surface frame collapsed during orthonormalization");
    P.row(i) = (r / nr).transpose();
  }
}

// Orthonormal basis of the complement of unit vector z (rows of the result).
Mat complement_basis(const Vec& z) {
  const int n = static_cast<int>(z.size());
  Mat A = Mat::Identity(n, n) - z * z.transpose();
  Eigen::ColPivHouseholderQR<Mat> qr(A);
  Mat Q = qr.householderQ();
  Mat P(n - 1, n);
  for (int i = 0; i < n - 1; ++i) P.row(i) = Q.col(i).transpose();
  orthonormalize_rows(P, z);
  return P;
}

}  // namespace

SurfaceFamily build_orthogonal_surfaces(const LimitCycle& cycle) {
  const int M = cycle.grid_size();
  const int n = cycle.state_dim();
  if (M < 4 || n < 2)
    throw Error(errc::config, "cycle too small to build surfaces on");

  SurfaceFamily sf;
  sf.cycle_ = cycle;
  sf.kind_ = SurfaceKind::orthogonal;
  sf.normal_.resize(M, n);
  sf.proj_.resize(M);

  const double vel_scale = cycle.nominal_velocities.cwiseAbs().maxCoeff();
  for (int m = 0; m < M; ++m) {
    Vec v = cycle.nominal_velocities.row(m).transpose();
    const double nv = v.norm();
    if (nv < 1e-12 * std::max(1.0, vel_scale))
      throw Error(errc::degenerate_flow,
                  "nominal velocity vanishes on the cycle grid");
    sf.normal_.row(m) = (v / nv).transpose();
  }

  if (n == 2) {
    // A continuous planar frame follows pointwise from the normal.
    for (int m = 0; m < M; ++m) {
      Mat P(1, 2);
      P.row(0) = perp2(sf.normal_.row(m).transpose()).transpose();
      sf.proj_[m] = P;
    }
  } else {
    // Propagate a frame along the grid, then spread the closure mismatch
    // (holonomy of the transported frame) evenly so the family is periodic.
    sf.proj_[0] = complement_basis(sf.normal_.row(0).transpose());
    for (int m = 1; m < M; ++m) {
      Mat P = sf.proj_[m - 1];
      orthonormalize_rows(P, sf.normal_.row(m).transpose());
      sf.proj_[m] = P;
    }
    Mat P_wrap = sf.proj_[M - 1];
    orthonormalize_rows(P_wrap, sf.normal_.row(0).transpose());
    Mat C = sf.proj_[0] * P_wrap.transpose();  // (n-1) x (n-1), near SO(n-1)
    if (C.determinant() <= 0.0)
      throw Error(errc::frame_discontinuity,
                  "transported frame returns with flipped orientation");
    Mat L = C.log();
    for (int m = 0; m < M; ++m) {
      Mat R = (L * (static_cast<double>(m) / M)).exp();
      sf.proj_[m] = R * sf.proj_[m];
      orthonormalize_rows(sf.proj_[m], sf.normal_.row(m).transpose());
    }
  }

  sf.finalize();
  return sf;
}

SurfaceFamily build_center_surfaces(const LimitCycle& cycle,
                                    const Vec& center) {
  const int M = cycle.grid_size();
  const int n = cycle.state_dim();
  if (M < 4 || n < 2)
    throw Error(errc::config, "cycle too small to build surfaces on");
  if (n > 3)
    throw Error(errc::config,
                "center surfaces are defined for 2-d and 3-d states");
  if (center.size() != n)
    throw Error(errc::dimension_mismatch, "center point dimension mismatch");

  SurfaceFamily sf;
  sf.cycle_ = cycle;
  sf.kind_ = SurfaceKind::center;
  sf.center_ = center;
  sf.normal_.resize(M, n);
  sf.proj_.resize(M);

  const double amp = cycle.states.cwiseAbs().maxCoeff();
  std::vector<Vec> xi1(M), xi2(M);
  for (int m = 0; m < M; ++m) {
    Vec r = cycle.states.row(m).transpose() - center;
    const double nr = r.norm();
    if (nr < 1e-9 * std::max(1.0, amp))
      throw Error(errc::degenerate_center,
                  "cycle touches the surface center point");
    xi1[m] = r / nr;
  }

  if (n == 2) {
    for (int m = 0; m < M; ++m) {
      Mat P(1, 2);
      P.row(0) = xi1[m].transpose();
      sf.proj_[m] = P;
      Vec z = perp2(xi1[m]);
      Vec v = cycle.nominal_velocities.row(m).transpose();
      if (z.dot(v) < 0.0) z = -z;
      sf.normal_.row(m) = z.transpose();
    }
  } else {
    // Second in-surface direction: orthogonal to both the radial direction
    // and the flow, kept continuous along the grid.
    for (int m = 0; m < M; ++m) {
      Vec v = cycle.nominal_velocities.row(m).transpose();
      Vec c = cross3(xi1[m], v);
      const double nc = c.norm();
      if (nc < 1e-10 * std::max(1.0, v.norm()))
        throw Error(errc::non_transversal_surface,
                    "flow parallel to the radial direction");
      c /= nc;
      if (m > 0 && c.dot(xi2[m - 1]) < 0.0) c = -c;
      xi2[m] = c;
    }
    if (xi2[M - 1].dot(xi2[0]) < 0.0)
      throw Error(errc::frame_discontinuity,
                  "second surface direction does not close around the cycle");
    for (int m = 0; m < M; ++m) {
      Mat P(2, 3);
      P.row(0) = xi1[m].transpose();
      P.row(1) = xi2[m].transpose();
      Vec z = cross3(xi1[m], xi2[m]);
      z.normalize();
      Vec v = cycle.nominal_velocities.row(m).transpose();
      if (z.dot(v) < 0.0) z = -z;
      sf.proj_[m] = P;
      sf.normal_.row(m) = z.transpose();
    }
  }

  sf.finalize();
  if (sf.margin_ <= 0.0)
    throw Error(errc::non_transversal_surface,
                "center surfaces lose transversality on the cycle grid");
  return sf;
}

void SurfaceFamily::finalize() {
  const int M = cycle_.grid_size();
  const int n = cycle_.state_dim();
  const double T = cycle_.period;

  scale_ = std::max(1.0, cycle_.states.cwiseAbs().maxCoeff());

  // Transversality margin on the grid.
  margin_ = std::numeric_limits<double>::infinity();
  for (int m = 0; m < M; ++m) {
    const double d =
        normal_.row(m).dot(cycle_.nominal_velocities.row(m));
    margin_ = std::min(margin_, d);
  }
  if (kind_ == SurfaceKind::orthogonal && !(margin_ > 0.0))
    throw Error(errc::degenerate_flow,
                "orthogonal surfaces require positive flow speed");

  // Grid-step continuity guard: a sign flip or propagation glitch shows up
  // as a jump far above the smooth variation per step.
  for (int m = 0; m < M; ++m) {
    const int m1 = (m + 1) % M;
    const double dz = (normal_.row(m1) - normal_.row(m)).norm();
    const double dP = (proj_[m1] - proj_[m]).norm();
    if (dz > 0.5 || dP > 0.5)
      throw Error(errc::frame_discontinuity,
                  "surface frame jumps between adjacent grid phases");
  }

  interp_x_ = PeriodicInterpolant(T, cycle_.states);
  interp_z_ = PeriodicInterpolant(T, normal_);
  Mat P_flat(M, (n - 1) * n);
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < n - 1; ++i)
      for (int j = 0; j < n; ++j) P_flat(m, i * n + j) = proj_[m](i, j);
  interp_P_ = PeriodicInterpolant(T, P_flat);

  // Phase-derivative grids, taken from the interpolants so that grid values
  // and off-grid evaluation agree exactly.
  normal_dtau_.resize(M, n);
  proj_dtau_.resize(M);
  for (int m = 0; m < M; ++m) {
    const double tau = cycle_.tau_grid(m);
    normal_dtau_.row(m) = interp_z_.deriv(tau).transpose();
    Vec pd = interp_P_.deriv(tau);
    Mat Pd(n - 1, n);
    for (int i = 0; i < n - 1; ++i)
      for (int j = 0; j < n; ++j) Pd(i, j) = pd(i * n + j);
    proj_dtau_[m] = Pd;
  }
}

FrameSample SurfaceFamily::frame(double tau) const {
  const int n = state_dim();
  FrameSample f;
  f.xstar = interp_x_.eval(tau);
  f.xstar_dtau = interp_x_.deriv(tau);

  Vec z_raw = interp_z_.eval(tau);
  Vec zd_raw = interp_z_.deriv(tau);
  const double nz = z_raw.norm();
  f.normal = z_raw / nz;
  // Exact derivative of the normalized normal.
  f.normal_dtau =
      (zd_raw - f.normal * f.normal.dot(zd_raw)) / nz;

  Vec p_flat = interp_P_.eval(tau);
  Vec pd_flat = interp_P_.deriv(tau);
  Mat P(n - 1, n), Pd(n - 1, n);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n; ++j) {
      P(i, j) = p_flat(i * n + j);
      Pd(i, j) = pd_flat(i * n + j);
    }
  orthonormalize_rows(P, f.normal);
  f.proj = P;
  f.proj_dtau = Pd;
  return f;
}

double SurfaceFamily::constraint(double tau, const Vec& x) const {
  Vec z = interp_z_.eval(tau);
  return z.dot(x - interp_x_.eval(tau)) / z.norm();
}

}  // namespace lppv
