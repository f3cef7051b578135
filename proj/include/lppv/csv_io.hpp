#pragma once

#include <string>
#include <vector>

#include "lppv/kite_control.hpp"
#include "lppv/limit_cycle.hpp"
#include "lppv/ode.hpp"
#include "lppv/surfaces.hpp"
#include "lppv/transverse_map.hpp"

namespace lppv {

// All CSV output is deterministic: fixed column sets, '\n' line endings,
// numbers printed with up to 17 significant digits so doubles round-trip
// bit-exactly through the files.

// t,x1..xn,dx1..dxn,d1..dnd
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path);

// tau,x1..xn,v1..vn (grid samples of the cycle and nominal velocities)
void write_cycle_csv(const std::string& path, const LimitCycle& cycle);

// tau,xstar_1..n,z_1..n,margin
void write_surface_csv(const std::string& path, const SurfaceFamily& sf);

// t,tau,xperp_*,d_*,dxperp_*,tau_dot,p_*
void write_dataset_csv(const std::string& path, const TransverseDataset& ds);

// t,x_true_*,x_pred_*,xperp_pred_*,tau_pred  (transverse columns skipped for
// models without a transverse representation)
void write_prediction_csv(const std::string& path, const Vec& times,
                          const Mat& truth_states, const Mat& pred_states,
                          const Mat& pred_xperp, const Vec& pred_tau);

// tau,K1..K(n-1)
void write_gain_csv(const std::string& path, const PeriodicLqr& lqr,
                    double period);

// tau,gamma_star,u_star,theta_star,phi_star
void write_reference_csv(const std::string& path, const KiteReference& ref,
                         const LimitCycle& cycle);

// tau, then per coefficient element: model value and oracle value
void write_compare_csv(const std::string& path, const Vec& tau_grid,
                       const std::vector<Mat>& model_omega,
                       const std::vector<Mat>& oracle_omega);

// Shared formatting helper (17 significant digits, shortest form).
std::string format_double(double v);

}  // namespace lppv
