#include "lppv/kite_control.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "lppv/benchmarks.hpp"
#include "lppv/errors.hpp"

namespace lppv {

Vec KiteReference::initial_state() const {
  Vec x(3);
  x(0) = theta0;
  x(1) = phi0;
  x(2) = gamma(0.0);
  return x;
}

OdeSystem kite_feedforward_system(const KiteReference& ref) {
  OdeSystem sys;
  sys.state_dim = 3;
  sys.input_dim = 0;
  sys.param = Vec::Constant(1, ref.vr);
  sys.rhs = [ref](const Vec& x, const Vec&, double t) {
    return kite_rhs(x, ref.u(t), ref.vr);
  };
  return sys;
}

namespace {

// One-period shooting residual of the (theta, phi) closure.
Vec closure_residual(const KiteReference& ref, double integ_tol) {
  OdeSystem sys = kite_feedforward_system(ref);
  OdeSolution sol = solve_ivp(sys, ref.initial_state(), InputFn(), 0.0,
                              ref.period(), integ_tol);
  Vec r(2);
  r(0) = sol.y_end()(0) - ref.theta0;
  r(1) = sol.y_end()(1) - ref.phi0;
  return r;
}

}  // namespace

KiteReference build_reference(double omega, double theta0, double phi0,
                              double vr, const ReferenceOptions& opts) {
  KiteReference ref;
  ref.omega = omega;
  ref.theta0 = theta0;
  ref.phi0 = phi0;
  ref.vr = vr;
  ref.amplitude = opts.a_init;
  ref.phase = opts.b_init;

  auto residual = [&](double a, double b) {
    KiteReference r = ref;
    r.amplitude = a;
    r.phase = b;
    return closure_residual(r, opts.integ_tol);
  };

  Vec r = residual(ref.amplitude, ref.phase);
  for (int it = 0; it < opts.max_iter; ++it) {
    if (r.norm() < opts.tol) {
      // Orbit closes; sanity-check the command amplitude stayed physical.
      if (!(ref.amplitude > 1e-3) || !(ref.amplitude < M_PI))
        throw Error(errc::no_closed_orbit,
                    "closure solution has unphysical command amplitude");
      return ref;
    }

    // Finite-difference Jacobian of the closure residual in (a, b).
    const double h = 1e-7;
    Mat J(2, 2);
    J.col(0) = (residual(ref.amplitude + h, ref.phase) -
                residual(ref.amplitude - h, ref.phase)) /
               (2.0 * h);
    J.col(1) = (residual(ref.amplitude, ref.phase + h) -
                residual(ref.amplitude, ref.phase - h)) /
               (2.0 * h);

    Vec step = J.colPivHouseholderQr().solve(-r);
    if (!step.allFinite())
      throw Error(errc::no_closed_orbit,
                  "singular shooting Jacobian for the reference orbit");

    // Damped update: halve until the residual actually shrinks.
    double alpha = 1.0;
    bool accepted = false;
    for (int cut = 0; cut < 12; ++cut) {
      const Vec r_new = residual(ref.amplitude + alpha * step(0),
                                 ref.phase + alpha * step(1));
      if (r_new.norm() < r.norm()) {
        ref.amplitude += alpha * step(0);
        ref.phase += alpha * step(1);
        r = r_new;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted)
      throw Error(errc::no_closed_orbit,
                  "shooting iteration stalled before the orbit closed");
  }
  throw Error(errc::no_closed_orbit,
              "orbit closure did not converge within the iteration budget");
}

LimitCycle reference_cycle(const KiteReference& ref, int grid_size) {
  OdeSystem sys = kite_feedforward_system(ref);
  return cycle_from_orbit(sys, ref.initial_state(), ref.period(), grid_size);
}

namespace {

// Largest radius at which a phase assignment is unambiguous: the figure-eight
// branches pass near each other, so a point can only be trusted to belong to
// the phase whose nominal point is well inside the cross-branch gap.
double branch_trust_radius(const LimitCycle& cycle) {
  const int G = cycle.grid_size();
  double sep = std::numeric_limits<double>::infinity();
  for (int i = 0; i < G; ++i)
    for (int j = i + G / 4; j <= i + 3 * G / 4 && j < G; ++j)
      sep = std::min(sep, (cycle.states.row(i) - cycle.states.row(j)).norm());
  return 0.45 * sep;
}

// Resolve the phase with the cached warm start.  The cache may be stale (the
// system is reused across trajectories and across integration/sampling
// passes), and a stale warm start can converge onto the other branch of the
// figure-eight; accept it only when the state stays within the trust radius
// of the implied nominal point, otherwise reseed from the nearest grid phase.
TransverseCoords resolve_phase(const Vec& x, const SurfaceFamily& sf,
                               double* cache, double trust) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (std::isfinite(*cache) && sf.distance_to_nominal(*cache, x) <= trust) {
    try {
      TransverseCoords tc = to_transverse(x, sf, *cache);
      if (sf.distance_to_nominal(tc.tau, x) <= trust) {
        *cache = tc.tau;
        return tc;
      }
    } catch (const Error&) {
    }
  }
  TransverseCoords tc = to_transverse(x, sf, nan);
  *cache = tc.tau;
  return tc;
}

}  // namespace

OdeSystem kite_openloop_transverse(const KiteReference& ref,
                                   const SurfaceFamily& sf) {
  auto sfp = std::make_shared<SurfaceFamily>(sf);
  auto cache =
      std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
  const double trust = branch_trust_radius(sf.cycle());
  OdeSystem sys;
  sys.state_dim = 3;
  sys.input_dim = 1;
  sys.param = Vec::Constant(1, ref.vr);
  sys.rhs = [ref, sfp, cache, trust](const Vec& x, const Vec& d, double) {
    const TransverseCoords tc = resolve_phase(x, *sfp, cache.get(), trust);
    const double u = ref.u(tc.tau) + (d.size() > 0 ? d(0) : 0.0);
    return kite_rhs(x, u, ref.vr);
  };
  return sys;
}

PeriodicLqr solve_periodic_lqr(const LppvModel& openloop, const Mat& Q,
                               double R, const LqrOptions& opts) {
  const int np = openloop.perp_dim();
  if (Q.rows() != np || Q.cols() != np)
    throw Error(errc::dimension_mismatch, "state weight dimension mismatch");
  if (!(R > 0.0)) throw Error(errc::config, "input weight must be positive");
  if ((Q - Q.transpose()).norm() > 1e-12 * std::max(1.0, Q.norm()))
    throw Error(errc::config, "state weight must be symmetric");
  const double T = openloop.period();

  // Backward differential Riccati equation, integrated forward in
  // s = T - tau from the terminal value.
  OdeSystem riccati;
  riccati.state_dim = np * np;
  riccati.input_dim = 0;
  riccati.rhs = [&openloop, &Q, R, np, T](const Vec& y, const Vec&,
                                          double s) {
    Mat P(np, np);
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < np; ++j) P(i, j) = y(i * np + j);
    const double tau = T - s;
    const Mat A = openloop.A(tau);
    const Mat B = openloop.B(tau);
    const Mat Pd = A.transpose() * P + P * A -
                   (P * B) * (1.0 / R) * (B.transpose() * P) + Q;
    Vec out(np * np);
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < np; ++j) out(i * np + j) = Pd(i, j);
    return out;
  };

  auto vec_of = [np](const Mat& P) {
    Vec y(np * np);
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < np; ++j) y(i * np + j) = P(i, j);
    return y;
  };
  auto mat_of = [np](const Vec& y) -> Mat {
    Mat P(np, np);
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < np; ++j) P(i, j) = y(i * np + j);
    Mat sym = 0.5 * (P + P.transpose());  // keep symmetric against drift
    return sym;
  };

  Mat P_terminal = Q;
  double residual = std::numeric_limits<double>::infinity();
  bool periodic = false;
  OdeSolution sweep;
  for (int k = 0; k < opts.max_sweeps; ++k) {
    sweep = solve_ivp(riccati, vec_of(P_terminal), InputFn(), 0.0, T,
                      opts.integ_tol);
    const Mat P0 = mat_of(sweep.y_end());
    if (!P0.allFinite() || P0.norm() > 1e8)
      throw Error(errc::riccati_divergence,
                  "Riccati sweep diverged (unstabilizable transverse pair?)");
    residual = (P0 - P_terminal).norm();
    P_terminal = P0;
    if (residual < opts.tol) {
      periodic = true;
      break;
    }
  }
  if (!periodic)
    throw Error(errc::riccati_divergence,
                "Riccati solution did not become periodic within the budget");

  // One more sweep from the converged terminal value supplies P(tau) on the
  // whole period through the dense output.
  sweep = solve_ivp(riccati, vec_of(P_terminal), InputFn(), 0.0, T,
                    opts.integ_tol);

  const int M = 512;
  PeriodicLqr lqr;
  lqr.q_weight = Q;
  lqr.r_weight = R;
  lqr.residual = residual;
  lqr.gain_grid.resize(M, np);
  lqr.p_grid.resize(M);
  for (int m = 0; m < M; ++m) {
    const double tau = T * m / M;
    const Mat P = mat_of(sweep.eval(T - tau));
    const Eigen::SelfAdjointEigenSolver<Mat> es(P);
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, P.norm()))
      throw Error(errc::riccati_divergence,
                  "Riccati solution lost positive semidefiniteness");
    lqr.p_grid[m] = P;
    lqr.gain_grid.row(m) =
        ((1.0 / R) * (openloop.B(tau).transpose() * P)).row(0);
  }
  lqr.gain_interp = PeriodicInterpolant(T, lqr.gain_grid);
  return lqr;
}

OdeSystem kite_closed_loop(const KiteReference& ref, const SurfaceFamily& sf,
                           const PeriodicLqr& lqr) {
  auto sfp = std::make_shared<SurfaceFamily>(sf);
  auto lqrp = std::make_shared<PeriodicLqr>(lqr);
  auto cache =
      std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
  const double trust = branch_trust_radius(sf.cycle());
  OdeSystem sys;
  sys.state_dim = 3;
  sys.input_dim = 0;
  sys.param = Vec::Constant(1, ref.vr);
  sys.rhs = [ref, sfp, lqrp, cache, trust](const Vec& x, const Vec&, double) {
    const TransverseCoords tc = resolve_phase(x, *sfp, cache.get(), trust);
    const double u = ref.u(tc.tau) - lqrp->gain(tc.tau).dot(tc.xperp);
    return kite_rhs(x, u, ref.vr);
  };
  return sys;
}

void inject_feedback_input(TransverseDataset& ds, const PeriodicLqr& lqr) {
  if (ds.input_dim != 0)
    throw Error(errc::config,
                "dataset already carries an exogenous input channel");
  for (auto& s : ds.samples) {
    Vec u(1);
    u(0) = -lqr.gain(s.tau).dot(s.xperp);
    s.input = u;
  }
  ds.input_dim = 1;
}

}  // namespace lppv
