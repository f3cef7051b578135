#pragma once

#include "lppv/limit_cycle.hpp"
#include "lppv/lppv_model.hpp"
#include "lppv/surfaces.hpp"
#include "lppv/transverse_map.hpp"

namespace lppv {

// Figure-eight heading reference for the kite:
//   gamma*(tau) = a cos(omega tau + b),  u*(tau) = d gamma*/d tau.
// (a, b) are chosen so the kite orbit through (theta0, phi0) closes after
// one command period.
struct KiteReference {
  double amplitude = 0.0;  // a
  double phase = 0.0;      // b
  double omega = 0.8;
  double theta0 = M_PI / 4.0;
  double phi0 = M_PI / 4.0;
  double vr = 0.0;

  double period() const { return 2.0 * M_PI / omega; }
  double gamma(double tau) const {
    return amplitude * std::cos(omega * tau + phase);
  }
  double u(double tau) const {
    return -amplitude * omega * std::sin(omega * tau + phase);
  }
  Vec initial_state() const;
};

struct ReferenceOptions {
  double a_init = 2.4;
  double b_init = 0.0;
  double tol = 1e-10;       // orbit closure tolerance for the Newton solve
  int max_iter = 50;
  double integ_tol = 1e-12;
};

// Solve the two-point closure condition for (a, b) by damped Newton
// iteration on the one-period shooting residual.  Throws
// Error("no-closed-orbit") when the iteration fails.
KiteReference build_reference(double omega, double theta0, double phi0,
                              double vr, const ReferenceOptions& opts = {});

// Kite under the time-indexed feedforward command u*(t) (valid on the
// reference orbit, where phase equals time).
OdeSystem kite_feedforward_system(const KiteReference& ref);

// The closed reference orbit resampled as a LimitCycle.
LimitCycle reference_cycle(const KiteReference& ref, int grid_size);

// Kite with the turn-rate command split as u = u*(tau(x)) + d, the phase
// resolved on the surfaces; this is the plant whose transverse
// linearization feeds the gain design.
OdeSystem kite_openloop_transverse(const KiteReference& ref,
                                   const SurfaceFamily& sf);

// Periodic LQR gain for the transverse dynamics.
struct PeriodicLqr {
  Mat q_weight;
  double r_weight = 1.0;
  Mat gain_grid;            // M x perp_dim, K(tau_m)
  std::vector<Mat> p_grid;  // Riccati solution on the grid
  double residual = 0.0;    // ||P(0) - P(T)||_F at convergence
  PeriodicInterpolant gain_interp;

  Eigen::RowVectorXd gain(double tau) const {
    return gain_interp.eval(tau).transpose();
  }
};

struct LqrOptions {
  double tol = 1e-8;        // periodicity residual target
  int max_sweeps = 200;
  double integ_tol = 1e-10;
};

// Solve the periodic Riccati equation by repeated backward sweeps of the
// differential Riccati equation over one period (terminal value Q, then the
// previous sweep's initial value) until the solution is periodic, and
// return the gain K(tau) = R^{-1} B(tau)^T P(tau) on the phase grid.
// `openloop` must provide A(tau) and B(tau) (grid-backed linearization).
// Throws Error("riccati-divergence") when the sweeps blow up or fail to
// become periodic.
PeriodicLqr solve_periodic_lqr(const LppvModel& openloop, const Mat& Q,
                               double R, const LqrOptions& opts = {});

// Autonomous closed loop u = u*(tau) - K(tau) xperp with (tau, xperp)
// resolved from the state on the surfaces.  The phase root search is
// warm-started from the previous query of the same system instance.
OdeSystem kite_closed_loop(const KiteReference& ref, const SurfaceFamily& sf,
                           const PeriodicLqr& lqr);

// Rewrite a dataset built from closed-loop trajectories so the feedback
// command -K(tau) xperp appears as a recorded exogenous input (theta grows
// by one input column; responses are unchanged).
void inject_feedback_input(TransverseDataset& ds, const PeriodicLqr& lqr);

}  // namespace lppv
