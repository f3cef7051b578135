#include "lppv/limit_cycle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "lppv/errors.hpp"

namespace lppv {

namespace {

struct Crossing {
  double t = 0.0;
  Vec x;
  double dist = 0.0;  // distance of the crossing state to the anchor
};

// Refine a sign change of s(t) = normal . (sol(t) - anchor) inside [ta, tb]
// by bisection with secant acceleration.
double refine_crossing(const OdeSolution& sol, const Vec& normal,
                       const Vec& anchor, double ta, double tb) {
  auto s = [&](double t) { return normal.dot(sol.eval(t) - anchor); };
  double fa = s(ta), fb = s(tb);
  for (int it = 0; it < 100 && tb - ta > 1e-15 * std::max(1.0, std::abs(tb));
       ++it) {
    double tm = tb - fb * (tb - ta) / (fb - fa);  // secant proposal
    const double lo = ta + 0.1 * (tb - ta), hi = tb - 0.1 * (tb - ta);
    if (!(tm > lo && tm < hi)) tm = 0.5 * (ta + tb);  // fall back to bisection
    const double fm = s(tm);
    if (fm == 0.0) return tm;
    if ((fa < 0.0) == (fm < 0.0)) {
      ta = tm;
      fa = fm;
    } else {
      tb = tm;
      fb = fm;
    }
  }
  return 0.5 * (ta + tb);
}

// All upward crossings of the section through `anchor` with normal along the
// flow at the anchor, found while integrating over [0, window].
std::vector<Crossing> section_returns(const OdeSystem& sys, const Vec& anchor,
                                      double window, double integ_tol,
                                      OdeSolution* sol_out) {
  Vec f0 = sys.rhs(anchor, Vec::Zero(sys.input_dim), 0.0);
  const double speed = f0.norm();
  if (!(speed > 1e-12))
    throw Error(errc::not_a_limit_cycle,
                "flow vanishes at the section anchor (equilibrium point?)");
  const Vec normal = f0 / speed;

  OdeSolution sol = solve_ivp(sys, anchor, InputFn(), 0.0, window, integ_tol);
  const auto& steps = sol.steps();

  // Section coordinate at the accepted-step endpoints.
  std::vector<double> ts, ss;
  ts.reserve(steps.size() + 1);
  ts.push_back(0.0);
  ss.push_back(0.0);
  for (const auto& st : steps) {
    const double te = st.t0 + st.h;
    ts.push_back(te);
    ss.push_back(normal.dot(sol.eval(te) - anchor));
  }
  double s_amp = 0.0;
  for (double v : ss) s_amp = std::max(s_amp, std::abs(v));
  const double s_floor = 1e-6 * s_amp;

  std::vector<Crossing> out;
  for (size_t i = 0; i + 1 < ts.size(); ++i) {
    // Genuine upward crossing: clearly below the section, then above.  The
    // floor keeps round-off at the departure (s(0) = 0) from registering.
    if (ss[i] < -s_floor && ss[i + 1] >= 0.0) {
      Crossing c;
      c.t = refine_crossing(sol, normal, anchor, ts[i], ts[i + 1]);
      c.x = sol.eval(c.t);
      c.dist = (c.x - anchor).norm();
      out.push_back(std::move(c));
    }
  }
  if (sol_out) *sol_out = std::move(sol);
  return out;
}

// Pick the first genuine return among crossing candidates.  When the window
// may span several periods, later returns of a contracting orbit come back
// closer than the first one, so "closest" alone would report a period
// multiple; instead take the earliest crossing whose distance is within a
// modest band of the closest.
const Crossing& pick_return(const std::vector<Crossing>& cands) {
  double dmin = cands.front().dist;
  for (const auto& c : cands) dmin = std::min(dmin, c.dist);
  double dmax = cands.front().dist;
  for (const auto& c : cands) dmax = std::max(dmax, c.dist);
  const double band = dmin + 0.05 * std::max(dmax - dmin, 1e-12) + 1e-12;
  for (const auto& c : cands)
    if (c.dist <= band) return c;
  return cands.front();
}

LimitCycle resample(const OdeSystem& sys, const Vec& x0, double period,
                    int grid_size, double integ_tol) {
  OdeSolution sol = solve_ivp(sys, x0, InputFn(), 0.0, period, integ_tol);
  const int n = sys.state_dim;
  LimitCycle lc;
  lc.period = period;
  lc.param = sys.param;
  lc.tau_grid.resize(grid_size);
  lc.states.resize(grid_size, n);
  lc.nominal_velocities.resize(grid_size, n);
  const Vec d0 = Vec::Zero(sys.input_dim);
  for (int m = 0; m < grid_size; ++m) {
    const double tau = period * m / grid_size;
    lc.tau_grid(m) = tau;
    const Vec x = sol.eval(tau);
    lc.states.row(m) = x.transpose();
    lc.nominal_velocities.row(m) = sys.rhs(x, d0, tau).transpose();
  }
  return lc;
}

}  // namespace

LimitCycle find_limit_cycle(const OdeSystem& sys, const Vec& x0_guess,
                            const LimitCycleOptions& opts) {
  if (opts.grid_size < 2)
    throw Error(errc::config, "limit cycle grid size must be at least 2");

  Vec x_a = x0_guess;
  double t_est = 0.0;
  bool settled = false;
  const double scale = std::max(1.0, x0_guess.cwiseAbs().maxCoeff());

  for (int iter = 0; iter < opts.settle_periods; ++iter) {
    const double window = (t_est > 0.0) ? 1.8 * t_est : opts.max_period;
    auto cands = section_returns(sys, x_a, window, opts.integ_tol, nullptr);
    if (cands.empty())
      throw Error(errc::not_a_limit_cycle,
                  "no section recurrence within the search window");
    const Crossing& ret = pick_return(cands);
    const double drift = (ret.x - x_a).norm();
    x_a = ret.x;
    t_est = ret.t;
    if (drift < opts.tol * scale) {
      settled = true;
      break;
    }
  }
  if (!settled)
    throw Error(errc::convergence,
                "Poincare return map did not settle within the period budget");

  // Final period from the settled anchor; a fresh pass keeps period and
  // anchor mutually consistent.
  auto cands = section_returns(sys, x_a, 1.5 * t_est, opts.integ_tol, nullptr);
  if (cands.empty())
    throw Error(errc::convergence, "settled anchor lost the section return");
  const Crossing& ret = pick_return(cands);
  if (ret.dist > 100.0 * opts.tol * scale)
    throw Error(errc::convergence,
                "section return does not close at the settled anchor");

  return resample(sys, x_a, ret.t, opts.grid_size,
                  std::min(opts.integ_tol, 1e-12));
}

LimitCycle cycle_from_orbit(const OdeSystem& sys, const Vec& x0, double period,
                            int grid_size, double integ_tol) {
  if (!(period > 0.0))
    throw Error(errc::config, "orbit period must be positive");
  OdeSolution sol = solve_ivp(sys, x0, InputFn(), 0.0, period, integ_tol);
  const double closure = (sol.y_end() - x0).norm();
  const double scale = std::max(1.0, x0.cwiseAbs().maxCoeff());
  if (closure > 1e-8 * scale)
    throw Error(errc::not_a_limit_cycle,
                "orbit does not close after one period (closure " +
                    std::to_string(closure) + ")");
  return resample(sys, x0, period, grid_size, integ_tol);
}

}  // namespace lppv
