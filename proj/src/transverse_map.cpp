#include "lppv/transverse_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lppv/errors.hpp"

namespace lppv {

namespace {

// Polish a root of the constraint inside [a, b] (secant with bisection
// fallback).  fa, fb have opposite signs unless one endpoint is already a
// root within ftol.
double polish_root(const SurfaceFamily& sf, const Vec& x, double a, double b,
                   double fa, double fb, double ftol, int max_iter) {
  if (std::abs(fa) <= ftol) return a;
  if (std::abs(fb) <= ftol) return b;
  for (int it = 0; it < max_iter && b - a > 1e-14 * sf.period(); ++it) {
    double tm = b - fb * (b - a) / (fb - fa);
    const double lo = a + 0.05 * (b - a), hi = b - 0.05 * (b - a);
    if (!(tm > lo && tm < hi)) tm = 0.5 * (a + b);
    const double fm = sf.constraint(tm, x);
    if (std::abs(fm) <= ftol) return tm;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = tm;
      fa = fm;
    } else {
      b = tm;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double nearest_grid_tau(const Vec& x, const SurfaceFamily& sf) {
  const auto& cyc = sf.cycle();
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int m = 0; m < cyc.grid_size(); ++m) {
    const double d = (cyc.states.row(m).transpose() - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = m;
    }
  }
  return cyc.tau_grid(best);
}

TransverseCoords to_transverse(const Vec& x, const SurfaceFamily& sf,
                               double tau_init,
                               const ToTransverseOptions& opts) {
  if (x.size() != sf.state_dim())
    throw Error(errc::dimension_mismatch, "state dimension mismatch");
  if (std::isnan(tau_init)) tau_init = nearest_grid_tau(x, sf);

  const double T = sf.period();
  const double half = opts.bracket_fraction * T;
  const int S = std::max(opts.scan_points, 5);
  const double ftol = opts.constraint_tol * sf.scale();

  // Scan the constraint over the bracket and polish every sign change.
  std::vector<double> taus(S), vals(S);
  for (int i = 0; i < S; ++i) {
    taus[i] = tau_init - half + 2.0 * half * i / (S - 1);
    vals[i] = sf.constraint(taus[i], x);
  }

  std::vector<double> roots;
  for (int i = 0; i < S; ++i) {
    if (std::abs(vals[i]) <= ftol) {
      roots.push_back(taus[i]);
      continue;
    }
    if (i + 1 < S && (vals[i] < 0.0) != (vals[i + 1] < 0.0))
      roots.push_back(polish_root(sf, x, taus[i], taus[i + 1], vals[i],
                                  vals[i + 1], ftol, opts.max_iter));
  }
  if (roots.empty())
    throw Error(errc::out_of_neighborhood,
                "no transverse surface through the state near the phase guess");

  // Deduplicate, then keep the root whose nominal point is closest.
  std::sort(roots.begin(), roots.end());
  double best_tau = roots[0];
  double best_d = std::numeric_limits<double>::infinity();
  double prev = -std::numeric_limits<double>::infinity();
  for (double r : roots) {
    if (r - prev < 1e-9 * T) continue;
    prev = r;
    const double d = sf.distance_to_nominal(r, x);
    if (d < best_d) {
      best_d = d;
      best_tau = r;
    }
  }

  FrameSample f = sf.frame(best_tau);
  TransverseCoords tc;
  tc.tau = wrap_phase(best_tau, T);
  tc.xperp = f.proj * (x - f.xstar);
  return tc;
}

Vec from_transverse(const Vec& xperp, double tau, const SurfaceFamily& sf) {
  if (xperp.size() != sf.perp_dim())
    throw Error(errc::dimension_mismatch, "transverse offset dimension mismatch");
  FrameSample f = sf.frame(tau);
  return f.xstar + f.proj.transpose() * xperp;
}

double tau_dot_denominator(const Vec& x, double tau, const SurfaceFamily& sf) {
  FrameSample f = sf.frame(tau);
  return f.normal.dot(f.xstar_dtau) - f.normal_dtau.dot(x - f.xstar);
}

TransverseRates transverse_derivatives(const Vec& x, const Vec& xdot,
                                       const Vec& xperp, double tau,
                                       const SurfaceFamily& sf) {
  (void)xperp;  // coordinates enter through (x, tau); kept for call symmetry
  FrameSample f = sf.frame(tau);
  const Vec r = x - f.xstar;
  const double den = f.normal.dot(f.xstar_dtau) - f.normal_dtau.dot(r);
  const double floor = 1e-12 * std::max(1.0, f.xstar_dtau.norm());
  if (!(den > floor))
    throw Error(errc::well_posedness,
                "phase-rate denominator not positive at the sample");
  TransverseRates tr;
  tr.tau_dot = f.normal.dot(xdot) / den;
  tr.xperp_dot =
      tr.tau_dot * (f.proj_dtau * r) + f.proj * (xdot - f.xstar_dtau * tr.tau_dot);
  return tr;
}

Mat TransverseDataset::theta_matrix() const {
  Mat out(size(), theta_dim());
  for (int i = 0; i < size(); ++i) {
    out.row(i).head(perp_dim()) = samples[i].xperp.transpose();
    if (input_dim > 0) out.row(i).tail(input_dim) = samples[i].input.transpose();
  }
  return out;
}

Mat TransverseDataset::zeta_matrix() const {
  Mat out(size(), state_dim);
  for (int i = 0; i < size(); ++i) {
    out.row(i).head(perp_dim()) = samples[i].xperp_dot.transpose();
    out(i, state_dim - 1) = samples[i].tau_dot - 1.0;
  }
  return out;
}

Vec TransverseDataset::tau_vector() const {
  Vec out(size());
  for (int i = 0; i < size(); ++i) out(i) = samples[i].tau;
  return out;
}

Mat TransverseDataset::param_matrix() const {
  Mat out(size(), param_dim);
  for (int i = 0; i < size(); ++i) out.row(i) = samples[i].param.transpose();
  return out;
}

void TransverseDataset::append(const TransverseDataset& other) {
  if (other.state_dim != state_dim || other.input_dim != input_dim ||
      other.param_dim != param_dim)
    throw Error(errc::dimension_mismatch,
                "cannot merge datasets over different spaces");
  if (std::abs(other.period - period) > 1e-9 * std::max(1.0, period))
    throw Error(errc::dimension_mismatch,
                "cannot merge datasets with different periods");
  samples.insert(samples.end(), other.samples.begin(), other.samples.end());
  dropped += other.dropped;
}

TransverseDataset build_dataset(const Trajectory& traj,
                                const SurfaceFamily& sf, const Vec& param,
                                const DatasetOptions& opts) {
  if (traj.state_dim() != sf.state_dim())
    throw Error(errc::dimension_mismatch,
                "trajectory and surface state dimensions differ");
  const int N = traj.size();
  if (N == 0) throw Error(errc::config, "empty trajectory");

  TransverseDataset ds;
  ds.state_dim = sf.state_dim();
  ds.input_dim = traj.input_dim();
  ds.param_dim = static_cast<int>(param.size());
  ds.period = sf.period();

  double warm = std::numeric_limits<double>::quiet_NaN();
  double prev_t = traj.times(0);
  for (int i = 0; i < N; ++i) {
    const double t = traj.times(i);
    const Vec x = traj.states.row(i).transpose();
    const Vec xd = traj.derivs.row(i).transpose();
    const double tau_guess =
        std::isnan(warm) ? warm : warm + (t - prev_t);  // phase tracks time
    try {
      TransverseCoords tc = to_transverse(x, sf, tau_guess, opts.root);
      // Keep the unwrapped guess continuous: move warm to the resolved
      // phase on the same winding as the guess.
      if (!std::isnan(tau_guess)) {
        double delta = std::remainder(tc.tau - tau_guess, sf.period());
        warm = tau_guess + delta;
      } else {
        warm = tc.tau;
      }
      prev_t = t;

      const double den = tau_dot_denominator(x, tc.tau, sf);
      FrameSample f = sf.frame(tc.tau);
      const double den_nominal = f.normal.dot(f.xstar_dtau);
      if (!(den > opts.denominator_floor * den_nominal)) {
        ++ds.dropped;
        continue;
      }
      TransverseRates tr = transverse_derivatives(x, xd, tc.xperp, tc.tau, sf);

      TransverseSample s;
      s.t = t;
      s.tau = tc.tau;
      s.xperp = tc.xperp;
      s.input = traj.inputs.row(i).transpose();
      s.xperp_dot = tr.xperp_dot;
      s.tau_dot = tr.tau_dot;
      s.param = param;
      ds.samples.push_back(std::move(s));
    } catch (const Error& e) {
      if (e.category() == errc::out_of_neighborhood ||
          e.category() == errc::well_posedness) {
        ++ds.dropped;
        // Phase guess still advances with time for the next sample.
        if (!std::isnan(warm)) {
          warm += t - prev_t;
          prev_t = t;
        }
        continue;
      }
      throw;
    }
  }

  if (ds.dropped > opts.max_drop_fraction * N)
    throw Error(errc::dataset_degenerate,
                "more than half of the trajectory left the well-posed "
                "neighborhood of the surfaces");
  return ds;
}

}  // namespace lppv
