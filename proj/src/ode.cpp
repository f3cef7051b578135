#include "lppv/ode.hpp"

#include <algorithm>
#include <cmath>

#include "lppv/errors.hpp"

namespace lppv {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                 c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// Difference between the 5th and embedded 4th order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense-output coefficients (quartic continuous extension).
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

constexpr long kMaxSteps = 50'000'000;

}  // namespace

InputFn zero_input() {
  return [](double) { return Vec(); };
}

InputFn sine_input(double amplitude, double omega) {
  return [amplitude, omega](double t) {
    Vec d(1);
    d(0) = amplitude * std::sin(omega * t);
    return d;
  };
}

Vec OdeSolution::eval(double t) const {
  if (steps_.empty())
    throw Error(errc::numerical, "dense output queried on empty solution");
  const double lo = std::min(t_begin_, t_end_), hi = std::max(t_begin_, t_end_);
  const double slack = 1e-9 * (1.0 + hi - lo);
  if (t < lo - slack || t > hi + slack)
    throw Error(errc::numerical, "dense output queried outside solution span");

  // Locate the step containing t, starting from the previous hit.
  int i = std::clamp(hint_, 0, static_cast<int>(steps_.size()) - 1);
  auto contains = [&](int k) {
    const auto& s = steps_[k];
    const double a = s.t0, b = s.t0 + s.h;
    return (t >= std::min(a, b) - slack) && (t <= std::max(a, b) + slack);
  };
  if (!contains(i)) {
    // Binary search over step start times (monotone in integration order).
    int lo_i = 0, hi_i = static_cast<int>(steps_.size()) - 1;
    const bool fwd = t_end_ >= t_begin_;
    while (lo_i < hi_i) {
      const int mid = (lo_i + hi_i + 1) / 2;
      const bool before = fwd ? (steps_[mid].t0 <= t + slack)
                              : (steps_[mid].t0 >= t - slack);
      if (before)
        lo_i = mid;
      else
        hi_i = mid - 1;
    }
    i = lo_i;
  }
  hint_ = i;
  const auto& s = steps_[i];
  const double th = (t - s.t0) / s.h;
  const double th1 = 1.0 - th;
  return s.rcont1 +
         th * (s.rcont2 + th1 * (s.rcont3 + th * (s.rcont4 + th1 * s.rcont5)));
}

OdeSolution solve_ivp(const OdeSystem& sys, const Vec& x0, const InputFn& input,
                      double t0, double t1, double tol) {
  if (!sys.rhs) throw Error(errc::config, "system has no right-hand side");
  if (x0.size() != sys.state_dim)
    throw Error(errc::dimension_mismatch,
                "initial state dimension does not match system");
  if (!(tol > 0.0) || !std::isfinite(tol))
    throw Error(errc::config, "integration tolerance must be positive");

  const int n = sys.state_dim;
  const Vec d_empty = Vec::Zero(sys.input_dim);
  auto in = [&](double t) -> Vec {
    if (!input) return d_empty;
    Vec d = input(t);
    if (d.size() == 0 && sys.input_dim > 0) return d_empty;
    if (d.size() != sys.input_dim)
      throw Error(errc::dimension_mismatch,
                  "input signal dimension does not match system");
    return d;
  };
  auto f = [&](double t, const Vec& y) { return sys.rhs(y, in(t), t); };

  OdeSolution sol;
  sol.t_begin_ = t0;
  sol.t_end_ = t1;
  if (t1 == t0) {
    sol.y_end_ = x0;
    OdeStep s;  // degenerate zero-length step so eval(t0) works
    s.t0 = t0;
    s.h = 1.0;
    s.rcont1 = x0;
    s.rcont2 = s.rcont3 = s.rcont4 = s.rcont5 = Vec::Zero(n);
    sol.steps_.push_back(std::move(s));
    return sol;
  }

  const double dir = (t1 > t0) ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  double t = t0;
  Vec y = x0;
  Vec k1 = f(t, y);

  // Initial step size: crude curvature probe, then clipped to the span.
  double h;
  {
    const double sc = tol;
    const double dn0 = (y.array().abs() + sc).matrix().norm();
    const double dn1 = (k1.array().abs() + sc).matrix().norm();
    double h0 = (dn1 > 1e-12) ? 0.01 * dn0 / dn1 : 1e-6;
    h0 = std::min(h0, span);
    Vec y_pr = y + dir * h0 * k1;
    Vec k_pr = f(t + dir * h0, y_pr);
    const double d2 = (k_pr - k1).norm() / std::max(h0, 1e-300);
    double h1 = (d2 > 1e-12) ? std::pow(0.01 / d2, 0.2) : h0 * 10.0;
    h = std::min({100.0 * h0, h1, span});
  }

  Vec k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y5(n), err(n);
  long n_steps = 0;
  bool last = false;

  while (true) {
    if (++n_steps > kMaxSteps)
      throw Error(errc::stiffness, "step budget exhausted during integration");
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw Error(errc::stiffness, "step size collapsed during integration");

    if (std::abs(t - t0) + h >= span) {
      h = span - std::abs(t - t0);
      last = true;
    }
    const double hs = dir * h;

    k2 = f(t + c2 * hs, y + hs * (a21 * k1));
    k3 = f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
    k4 = f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = f(t + hs,
           y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y5 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = f(t + hs, y5);  // FSAL

    err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err_norm = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc =
          tol + tol * std::max(std::abs(y(i)), std::abs(y5(i)));
      const double r = err(i) / sc;
      err_norm += r * r;
    }
    err_norm = std::sqrt(err_norm / n);

    if (err_norm <= 1.0) {
      OdeStep s;
      s.t0 = t;
      s.h = hs;
      s.rcont1 = y;
      s.rcont2 = y5 - y;
      s.rcont3 = hs * k1 - s.rcont2;
      s.rcont4 = s.rcont2 - hs * k7 - s.rcont3;
      s.rcont5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 +
                       d7 * k7);
      sol.steps_.push_back(std::move(s));

      t += hs;
      y.swap(y5);
      k1.swap(k7);
      if (last) break;
      const double fac =
          std::clamp(0.9 * std::pow(std::max(err_norm, 1e-10), -0.2), 0.2,
                     5.0);
      h = std::min(h * fac, span);
    } else {
      last = false;
      const double fac =
          std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 1.0);
      h *= fac;
    }
  }

  sol.y_end_ = y;
  return sol;
}

namespace {

Trajectory sample_solution(const OdeSystem& sys, const InputFn& input,
                           const OdeSolution& sol, const Vec& times) {
  const int n = sys.state_dim, nd = sys.input_dim;
  const int N = static_cast<int>(times.size());
  Trajectory tr;
  tr.times = times;
  tr.states.resize(N, n);
  tr.derivs.resize(N, n);
  tr.inputs.resize(N, nd);
  const Vec d_empty = Vec::Zero(nd);
  for (int i = 0; i < N; ++i) {
    const double t = times(i);
    Vec x = sol.eval(t);
    Vec d = input ? input(t) : d_empty;
    if (d.size() == 0 && nd > 0) d = d_empty;
    tr.states.row(i) = x.transpose();
    tr.derivs.row(i) = sys.rhs(x, d, t).transpose();
    tr.inputs.row(i) = d.transpose();
  }
  return tr;
}

}  // namespace

Trajectory integrate(const OdeSystem& sys, const Vec& x0, const InputFn& input,
                     double t0, double t1, double tol) {
  OdeSolution sol = solve_ivp(sys, x0, input, t0, t1, tol);
  const auto& steps = sol.steps();
  std::vector<double> ts;
  ts.reserve(steps.size() + 1);
  ts.push_back(t0);
  for (const auto& s : steps) ts.push_back(s.t0 + s.h);
  if (t1 == t0) ts.resize(1);
  Vec times = Eigen::Map<Vec>(ts.data(), static_cast<long>(ts.size()));
  return sample_solution(sys, input, sol, times);
}

Trajectory integrate_sampled(const OdeSystem& sys, const Vec& x0,
                             const InputFn& input, double t0, double t1,
                             double tol, const Vec& sample_times) {
  OdeSolution sol = solve_ivp(sys, x0, input, t0, t1, tol);
  return sample_solution(sys, input, sol, sample_times);
}

}  // namespace lppv
