#pragma once

#include "lppv/ode.hpp"

namespace lppv {

// Attracting periodic orbit, resampled on a uniform phase grid
// tau_m = m * period / M.  `nominal_velocities` holds the autonomous vector
// field evaluated on the grid (zero exogenous input).
struct LimitCycle {
  double period = 0.0;
  Vec tau_grid;
  Mat states;
  Mat nominal_velocities;
  Vec param;

  int grid_size() const { return static_cast<int>(tau_grid.size()); }
  int state_dim() const { return static_cast<int>(states.cols()); }
};

struct LimitCycleOptions {
  int grid_size = 512;
  int settle_periods = 40;   // budget of Poincare return-map iterations
  double tol = 1e-9;         // fixed-point tolerance on the section (relative)
  double max_period = 200.0; // time window when hunting for the first return
  double integ_tol = 1e-11;  // integrator tolerance during the search
};

// Locate an attracting limit cycle reachable from x0_guess by iterating the
// Poincare return map of a section anchored at the current iterate (normal
// along the flow), then resample one period on a uniform grid.
// Throws Error("not-a-limit-cycle") when no recurrence is found within the
// window and Error("convergence") when the return map fails to settle.
LimitCycle find_limit_cycle(const OdeSystem& sys, const Vec& x0_guess,
                            const LimitCycleOptions& opts = {});

// Build a LimitCycle from an orbit already known to be periodic: integrate
// one period from x0 and resample.  Verifies closure of the orbit.
LimitCycle cycle_from_orbit(const OdeSystem& sys, const Vec& x0, double period,
                            int grid_size, double integ_tol = 1e-12);

}  // namespace lppv
