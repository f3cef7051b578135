#include "lppv/lppv_model.hpp"

#include <cmath>

#include "lppv/errors.hpp"

namespace lppv {

LppvModel LppvModel::from_identified(IdentifiedModel model) {
  LppvModel m;
  m.state_dim_ = model.state_dim();
  m.input_dim_ = model.input_dim();
  m.period_ = model.period();
  m.ident_ = std::make_shared<const IdentifiedModel>(std::move(model));
  return m;
}

LppvModel LppvModel::from_grid(double period, int input_dim,
                               const std::vector<Mat>& omega_grid) {
  if (omega_grid.empty())
    throw Error(errc::config, "empty coefficient grid");
  const int n = static_cast<int>(omega_grid[0].rows());
  const int nt = static_cast<int>(omega_grid[0].cols());
  if (nt != n - 1 + input_dim)
    throw Error(errc::dimension_mismatch,
                "coefficient grid shape does not match dimensions");
  const int M = static_cast<int>(omega_grid.size());
  Mat flat(M, n * nt);
  for (int m = 0; m < M; ++m) {
    if (omega_grid[m].rows() != n || omega_grid[m].cols() != nt)
      throw Error(errc::dimension_mismatch, "ragged coefficient grid");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < nt; ++j) flat(m, i * nt + j) = omega_grid[m](i, j);
  }
  LppvModel model;
  model.state_dim_ = n;
  model.input_dim_ = input_dim;
  model.period_ = period;
  model.grid_ =
      std::make_shared<const PeriodicInterpolant>(period, flat);
  return model;
}

Mat LppvModel::omega(double tau, const Vec& p) const {
  if (ident_) return ident_->omega(wrap_phase(tau, period_), p);
  if (grid_) {
    const int n = state_dim_, nt = theta_dim();
    Vec flat = grid_->eval(tau);
    Mat W(n, nt);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < nt; ++j) W(i, j) = flat(i * nt + j);
    return W;
  }
  throw Error(errc::config, "model has no backing data");
}

Mat LppvModel::A(double tau, const Vec& p) const {
  return omega(tau, p).topLeftCorner(perp_dim(), perp_dim());
}

Mat LppvModel::B(double tau, const Vec& p) const {
  return omega(tau, p).topRightCorner(perp_dim(), input_dim_);
}

Eigen::RowVectorXd LppvModel::g(double tau, const Vec& p) const {
  return omega(tau, p).row(state_dim_ - 1).head(perp_dim());
}

Eigen::RowVectorXd LppvModel::h(double tau, const Vec& p) const {
  return omega(tau, p).row(state_dim_ - 1).tail(input_dim_);
}

Mat analytic_linearization(const OdeSystem& sys, const SurfaceFamily& sf,
                           double tau, const FdOptions& opts) {
  const int np = sf.perp_dim();
  const int nd = sys.input_dim;
  const int nt = np + nd;
  const int n = sf.state_dim();

  // Exact transverse response map at frozen phase tau:
  //   (xperp, d) -> (xperp_dot, tau_dot - 1).
  auto response = [&](const Vec& v) -> Vec {
    const Vec xp = v.head(np);
    const Vec d = v.tail(nd);
    const Vec x = from_transverse(xp, tau, sf);
    const Vec xdot = sys.rhs(x, d, 0.0);
    TransverseRates tr = transverse_derivatives(x, xdot, xp, tau, sf);
    Vec out(n);
    out.head(np) = tr.xperp_dot;
    out(n - 1) = tr.tau_dot - 1.0;
    return out;
  };

  const double h0 = opts.step * std::max(1.0, sf.scale());
  auto central = [&](double h) -> Mat {
    Mat D(n, nt);
    Vec v = Vec::Zero(nt);
    for (int c = 0; c < nt; ++c) {
      v(c) = h;
      const Vec plus = response(v);
      v(c) = -h;
      const Vec minus = response(v);
      v(c) = 0.0;
      D.col(c) = (plus - minus) / (2.0 * h);
    }
    return D;
  };

  const Mat D1 = central(h0);
  const Mat D2 = central(0.5 * h0);
  const Mat R = (4.0 * D2 - D1) / 3.0;  // Richardson extrapolation

  const double disagree = (D1 - D2).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, R.cwiseAbs().maxCoeff());
  if (disagree > opts.consistency_tol * scale)
    throw Error(errc::oracle_unreliable,
                "difference levels disagree in the transverse linearization");
  return R;
}

LppvModel linearization_model(const OdeSystem& sys, const SurfaceFamily& sf,
                              const FdOptions& opts) {
  const int M = sf.grid_size();
  std::vector<Mat> grid(M);
  for (int m = 0; m < M; ++m)
    grid[m] = analytic_linearization(sys, sf, sf.cycle().tau_grid(m), opts);
  return LppvModel::from_grid(sf.period(), sys.input_dim, grid);
}

IdentifyResult identify(const TransverseDataset& ds, bool multivariate,
                        const IdentifyOptions& opts) {
  if (ds.size() < 2)
    throw Error(errc::dataset_degenerate, "too few samples to identify from");
  if (multivariate && ds.param_dim == 0)
    throw Error(errc::config,
                "multivariate identification needs operating parameters");

  KernelSpec proto;
  proto.kind = multivariate ? KernelKind::multi : KernelKind::periodic_se;
  proto.period = ds.period;
  proto.length_scale_tau = opts.length_scale_init;
  if (multivariate)
    proto.length_scale_p = Vec::Constant(ds.param_dim, opts.length_scale_init);

  RowConfig init;
  init.element_kernels.assign(ds.theta_dim(), proto);
  init.lambda = opts.lambda_init;

  RegressionData data = flatten(ds);
  const Mat zeta = ds.zeta_matrix();

  IdentifyResult out;
  std::vector<IdentifiedRow> rows;
  for (int i = 0; i < ds.state_dim; ++i) {
    const Vec z = zeta.col(i);
    RowLog log;
    log.row = i;
    RowConfig chosen = init;
    if (opts.optimize) {
      HyperSearchOptions search = opts.search;
      search.seed = opts.search.seed + static_cast<std::uint64_t>(i);
      HyperSearchResult r = optimize_hypers(data, z, init, search);
      chosen = r.config;
      log.improved = r.improved;
      log.evaluations = r.evaluations;
    }
    RowFit fit = fit_row(data, chosen, z);
    log.config = chosen;
    log.marglik = log_marglik(data, chosen, z);
    log.jitter = fit.jitter;
    out.log.push_back(log);
    rows.push_back({chosen, fit.alpha});
  }
  out.model = IdentifiedModel(std::move(rows), std::move(data), ds.state_dim,
                              ds.input_dim, ds.param_dim, ds.period);
  return out;
}

TransverseTrajectory simulate(const LppvModel& model, const Vec& xperp0,
                              double tau0, const InputFn& input, double t0,
                              double t1, const Vec& p, double tol,
                              const Vec& sample_times) {
  const int np = model.perp_dim();
  if (xperp0.size() != np)
    throw Error(errc::dimension_mismatch, "initial offset dimension mismatch");

  OdeSystem sys;
  sys.state_dim = np + 1;
  sys.input_dim = model.input_dim();
  sys.rhs = [&model, &p, np](const Vec& y, const Vec& d, double) {
    Vec theta(np + d.size());
    theta.head(np) = y.head(np);
    if (d.size() > 0) theta.tail(d.size()) = d;
    const Vec zeta = model.omega(y(np), p) * theta;
    Vec dy(np + 1);
    dy.head(np) = zeta.head(np);
    dy(np) = 1.0 + zeta(np);
    return dy;
  };

  Vec y0(np + 1);
  y0.head(np) = xperp0;
  y0(np) = tau0;

  Trajectory tr = (sample_times.size() > 0)
                      ? integrate_sampled(sys, y0, input, t0, t1, tol,
                                          sample_times)
                      : integrate(sys, y0, input, t0, t1, tol);

  TransverseTrajectory tt;
  tt.times = tr.times;
  tt.xperp = tr.states.leftCols(np);
  tt.tau = tr.states.col(np);
  return tt;
}

Mat reconstruct(const TransverseTrajectory& tt, const SurfaceFamily& sf) {
  if (tt.xperp.cols() != sf.perp_dim())
    throw Error(errc::dimension_mismatch,
                "trajectory and surface dimensions differ");
  Mat states(tt.size(), sf.state_dim());
  for (int i = 0; i < tt.size(); ++i)
    states.row(i) =
        from_transverse(tt.xperp.row(i).transpose(), tt.tau(i), sf)
            .transpose();
  return states;
}

}  // namespace lppv
