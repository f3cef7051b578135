#pragma once

#include <vector>

#include "lppv/limit_cycle.hpp"
#include "lppv/periodic_interp.hpp"

namespace lppv {

enum class SurfaceKind { orthogonal, center };

// Moving frame of the transverse surface at one phase: nominal point and its
// phase derivative, the (n-1) x n projection onto the surface tangent, the
// unit surface normal, and the phase derivatives of both.  The projection
// rows are orthonormal and orthogonal to the normal.
struct FrameSample {
  Vec xstar, xstar_dtau;
  Mat proj;
  Vec normal;
  Mat proj_dtau;
  Vec normal_dtau;
};

// Family of hyperplanar surfaces transverse to a limit cycle, one per phase,
// each carrying an orthonormal coordinate frame.  Grid quantities live on
// the cycle's phase grid; off-grid evaluation goes through trigonometric
// interpolation of the periodic grid data.
class SurfaceFamily {
 public:
  const LimitCycle& cycle() const { return cycle_; }
  SurfaceKind kind() const { return kind_; }
  const Vec& center_point() const { return center_; }

  double period() const { return cycle_.period; }
  int state_dim() const { return cycle_.state_dim(); }
  int perp_dim() const { return cycle_.state_dim() - 1; }
  int grid_size() const { return cycle_.grid_size(); }

  const std::vector<Mat>& proj_grid() const { return proj_; }
  const Mat& normal_grid() const { return normal_; }
  const std::vector<Mat>& proj_dtau_grid() const { return proj_dtau_; }
  const Mat& normal_dtau_grid() const { return normal_dtau_; }

  // min over the grid of normal . nominal_velocity (the transversality
  // margin delta); construction guarantees it is positive.
  double transversality_margin() const { return margin_; }

  // Characteristic state amplitude, used to scale tolerances.
  double scale() const { return scale_; }

  // Interpolated frame at an arbitrary phase (period-wrapped).  The
  // projection is re-orthonormalized against the normalized normal.
  FrameSample frame(double tau) const;

  Vec nominal_state(double tau) const { return interp_x_.eval(tau); }

  // Surface membership residual  normal(tau) . (x - xstar(tau))  with unit
  // normal; cheap (no frame orthonormalization).
  double constraint(double tau, const Vec& x) const;

  double distance_to_nominal(double tau, const Vec& x) const {
    return (x - interp_x_.eval(tau)).norm();
  }

 private:
  friend SurfaceFamily build_orthogonal_surfaces(const LimitCycle&);
  friend SurfaceFamily build_center_surfaces(const LimitCycle&, const Vec&);

  void finalize();

  LimitCycle cycle_;
  SurfaceKind kind_ = SurfaceKind::orthogonal;
  Vec center_;
  std::vector<Mat> proj_, proj_dtau_;
  Mat normal_, normal_dtau_;
  double margin_ = 0.0;
  double scale_ = 1.0;
  PeriodicInterpolant interp_x_, interp_z_, interp_P_;
};

// Surfaces orthogonal to the flow: normal along the nominal velocity.
// Throws Error("degenerate-flow") if the velocity vanishes on the grid and
// Error("frame-discontinuity") if a continuous frame cannot be built.
SurfaceFamily build_orthogonal_surfaces(const LimitCycle& cycle);

// Surfaces through the nominal point containing the direction away from a
// center point (2-d and 3-d states).  Throws Error("degenerate-center") when
// the cycle touches the center and Error("non-transversal-surface") when the
// resulting surfaces lose transversality (margin <= 0).
SurfaceFamily build_center_surfaces(const LimitCycle& cycle, const Vec& center);

}  // namespace lppv
