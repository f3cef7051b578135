#pragma once

#include <functional>
#include <vector>

#include "lppv/core.hpp"

namespace lppv {

// Right-hand side f(x, d, t) of  xdot = f(x, d, t)  with exogenous input d.
// Systems without an input channel have input_dim == 0 and receive an empty
// vector for d.
struct OdeSystem {
  int state_dim = 0;
  int input_dim = 0;
  Vec param;  // operating parameters the vector field depends on (may be empty)
  std::function<Vec(const Vec& x, const Vec& d, double t)> rhs;
};

// Exogenous input signal t -> d(t).  A default-constructed (empty) function
// means "zero input".
using InputFn = std::function<Vec(double)>;

InputFn zero_input();
InputFn sine_input(double amplitude, double omega);

// Sampled solution of an initial value problem.  `derivs` holds the exact
// vector field evaluated at each sample (not a finite difference), `inputs`
// the input signal at each sample (N x input_dim, zero columns when the
// system has no input).
struct Trajectory {
  Vec times;
  Mat states;
  Mat derivs;
  Mat inputs;

  int size() const { return static_cast<int>(times.size()); }
  int state_dim() const { return static_cast<int>(states.cols()); }
  int input_dim() const { return static_cast<int>(inputs.cols()); }
};

// One accepted Runge-Kutta step together with the data needed for the
// quartic dense-output interpolant.
struct OdeStep {
  double t0 = 0.0;
  double h = 0.0;
  Vec rcont1, rcont2, rcont3, rcont4, rcont5;
};

// Continuous solution on [t_begin, t_end] assembled from accepted steps of
// the adaptive Dormand-Prince 5(4) integrator.
class OdeSolution {
 public:
  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }
  const Vec& y_end() const { return y_end_; }
  const std::vector<OdeStep>& steps() const { return steps_; }

  // Evaluate the dense-output interpolant at t in [t_begin, t_end].
  Vec eval(double t) const;

 private:
  friend OdeSolution solve_ivp(const OdeSystem&, const Vec&, const InputFn&,
                               double, double, double);
  std::vector<OdeStep> steps_;
  double t_begin_ = 0.0, t_end_ = 0.0;
  Vec y_end_;
  mutable int hint_ = 0;  // last bracketing step, warm start for eval()
};

// Integrate the system over [t0, t1] with adaptive error control; `tol` is
// used for both the absolute and relative per-step tolerance.  Throws
// Error("stiffness") if the step size collapses or the step budget is
// exhausted.
OdeSolution solve_ivp(const OdeSystem& sys, const Vec& x0, const InputFn& input,
                      double t0, double t1, double tol);

// Trajectory sampled on the integrator's accepted steps.
Trajectory integrate(const OdeSystem& sys, const Vec& x0, const InputFn& input,
                     double t0, double t1, double tol);

// Trajectory sampled at caller-chosen times (ascending, inside [t0, t1])
// using the dense output.
Trajectory integrate_sampled(const OdeSystem& sys, const Vec& x0,
                             const InputFn& input, double t0, double t1,
                             double tol, const Vec& sample_times);

}  // namespace lppv
