#pragma once

#include <vector>

#include "lppv/surfaces.hpp"

namespace lppv {

struct TransverseCoords {
  Vec xperp;
  double tau = 0.0;
};

struct TransverseRates {
  Vec xperp_dot;
  double tau_dot = 0.0;
};

struct ToTransverseOptions {
  double bracket_fraction = 0.125;  // half-width of the phase bracket / period
  int scan_points = 49;             // samples of the constraint in the bracket
  double constraint_tol = 1e-12;    // residual tolerance, relative to scale
  int max_iter = 80;
};

// Resolve the phase and transverse offset of a state: find the root of the
// surface-membership constraint nearest (in state distance) to x, searching
// a bracket around tau_init.  Pass tau_init = NaN to start from the grid
// phase whose nominal point is closest to x.  Throws
// Error("out-of-neighborhood") when no surface through the bracket contains
// the state.
TransverseCoords to_transverse(const Vec& x, const SurfaceFamily& sf,
                               double tau_init,
                               const ToTransverseOptions& opts = {});

// Reassemble the full state from transverse coordinates.
Vec from_transverse(const Vec& xperp, double tau, const SurfaceFamily& sf);

// Phase of the grid point nearest to x.
double nearest_grid_tau(const Vec& x, const SurfaceFamily& sf);

// Denominator of the phase-rate formula at (x, tau):
//   normal . dxstar/dtau - dnormal/dtau . (x - xstar).
// Positive along well-posed trajectories.
double tau_dot_denominator(const Vec& x, double tau, const SurfaceFamily& sf);

// Exact time derivatives of the transverse coordinates, given the state and
// its time derivative at resolved coordinates (xperp, tau):
//   tau_dot   = normal . xdot / denominator
//   xperp_dot = tau_dot dproj/dtau (x - xstar) + proj (xdot - dxstar/dtau tau_dot)
// Throws Error("well-posedness") when the denominator is not safely positive.
TransverseRates transverse_derivatives(const Vec& x, const Vec& xdot,
                                       const Vec& xperp, double tau,
                                       const SurfaceFamily& sf);

// One sample of the transverse-coordinate regression data.
struct TransverseSample {
  double t = 0.0;
  double tau = 0.0;
  Vec xperp;
  Vec input;
  Vec xperp_dot;
  double tau_dot = 0.0;
  Vec param;
};

// Regression dataset in transverse coordinates.  theta = [xperp; input] is
// the regressor, zeta = [xperp_dot; tau_dot - 1] the response.
struct TransverseDataset {
  std::vector<TransverseSample> samples;
  int state_dim = 0;
  int input_dim = 0;
  int param_dim = 0;
  double period = 0.0;
  int dropped = 0;  // samples discarded during conversion

  int size() const { return static_cast<int>(samples.size()); }
  int perp_dim() const { return state_dim - 1; }
  int theta_dim() const { return state_dim - 1 + input_dim; }

  Mat theta_matrix() const;
  Mat zeta_matrix() const;
  Vec tau_vector() const;
  Mat param_matrix() const;

  // Merge another dataset over the same spaces (e.g. other operating points).
  void append(const TransverseDataset& other);
};

struct DatasetOptions {
  // Drop samples whose phase-rate denominator falls below this fraction of
  // its nominal (on-cycle) value.
  double denominator_floor = 0.02;
  // More than this fraction dropped means the surfaces do not cover the
  // data; conversion fails with Error("dataset-degenerate").
  double max_drop_fraction = 0.5;
  ToTransverseOptions root;
};

// Convert a sampled trajectory to transverse-coordinate regression data,
// tracking the phase across samples (warm-started root search).  Samples
// whose conversion fails or is ill-posed are dropped and counted.
TransverseDataset build_dataset(const Trajectory& traj,
                                const SurfaceFamily& sf, const Vec& param,
                                const DatasetOptions& opts = {});

}  // namespace lppv
