#pragma once

#include <memory>
#include <vector>

#include "lppv/hyperopt.hpp"
#include "lppv/ode.hpp"
#include "lppv/regression.hpp"

namespace lppv {

// Linear periodically parameter-varying model of the dynamics around a
// limit cycle, in transverse coordinates:
//   xperp_dot = A(tau) xperp + B(tau) d
//   tau_dot   = 1 + g(tau) xperp + h(tau) d
// evaluated through the stacked coefficient matrix
//   omega(tau) = [A B; g h]   (state_dim x theta_dim).
// Backed either by an identified kernel-regression model or by a periodic
// interpolation of coefficient samples on a phase grid; either way every
// evaluated quantity is exactly periodic in tau.
class LppvModel {
 public:
  LppvModel() = default;

  static LppvModel from_identified(IdentifiedModel model);
  // omega_grid: one coefficient matrix per uniform grid phase.
  static LppvModel from_grid(double period, int input_dim,
                             const std::vector<Mat>& omega_grid);

  Mat omega(double tau, const Vec& p = Vec()) const;
  Mat A(double tau, const Vec& p = Vec()) const;
  Mat B(double tau, const Vec& p = Vec()) const;
  Eigen::RowVectorXd g(double tau, const Vec& p = Vec()) const;
  Eigen::RowVectorXd h(double tau, const Vec& p = Vec()) const;

  int state_dim() const { return state_dim_; }
  int perp_dim() const { return state_dim_ - 1; }
  int input_dim() const { return input_dim_; }
  int theta_dim() const { return state_dim_ - 1 + input_dim_; }
  double period() const { return period_; }

  // Non-null when the model is backed by kernel regression.
  const IdentifiedModel* identified() const { return ident_.get(); }

 private:
  std::shared_ptr<const IdentifiedModel> ident_;
  std::shared_ptr<const PeriodicInterpolant> grid_;  // flattened omega rows
  int state_dim_ = 0, input_dim_ = 0;
  double period_ = 0.0;
};

struct FdOptions {
  double step = 1e-5;            // base step, scaled by the cycle amplitude
  double consistency_tol = 1e-5; // max disagreement between difference levels
};

// Transverse linearization of the system about the cycle at phase tau,
// computed by Richardson-extrapolated central differences of the exact
// transverse derivative map.  Columns span [xperp; d].  Throws
// Error("oracle-unreliable") when the two difference levels disagree.
Mat analytic_linearization(const OdeSystem& sys, const SurfaceFamily& sf,
                           double tau, const FdOptions& opts = {});

// Sample the transverse linearization on the cycle's phase grid and wrap it
// as a periodic LppvModel.
LppvModel linearization_model(const OdeSystem& sys, const SurfaceFamily& sf,
                              const FdOptions& opts = {});

struct IdentifyOptions {
  HyperSearchOptions search;
  double lambda_init = 1e-3;
  double length_scale_init = 1.0;
  bool optimize = true;  // false: fit directly with the init hyperparameters
};

struct RowLog {
  int row = 0;
  RowConfig config;
  double marglik = 0.0;
  bool improved = false;
  int evaluations = 0;
  double jitter = 0.0;
};

struct IdentifyResult {
  IdentifiedModel model;
  std::vector<RowLog> log;
};

// Identify the coefficient matrix from transverse-coordinate data: per
// output row, empirical-Bayes hyperparameter selection followed by the
// ridge fit.  `multivariate` switches the element kernels to the product
// form over (phase, operating parameter).
IdentifyResult identify(const TransverseDataset& ds, bool multivariate,
                        const IdentifyOptions& opts = {});

// Simulated model trajectory in transverse coordinates; `tau` is the
// unwrapped phase.
struct TransverseTrajectory {
  Vec times;
  Mat xperp;
  Vec tau;
  int size() const { return static_cast<int>(times.size()); }
};

// Integrate the model dynamics from (xperp0, tau0) under input d(t).  With
// `sample_times` empty the accepted integrator steps are returned.
TransverseTrajectory simulate(const LppvModel& model, const Vec& xperp0,
                              double tau0, const InputFn& input, double t0,
                              double t1, const Vec& p = Vec(),
                              double tol = 1e-9,
                              const Vec& sample_times = Vec());

// Map a transverse trajectory back to full states through the surfaces.
Mat reconstruct(const TransverseTrajectory& tt, const SurfaceFamily& sf);

}  // namespace lppv
