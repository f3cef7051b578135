#include "lppv/regression.hpp"

#include <cmath>

#include "lppv/errors.hpp"

namespace lppv {

RegressionData flatten(const TransverseDataset& ds) {
  RegressionData rd;
  rd.theta = ds.theta_matrix();
  rd.tau = ds.tau_vector();
  rd.param = ds.param_matrix();
  return rd;
}

namespace {

void check_config(const RegressionData& data, const RowConfig& cfg) {
  if (static_cast<int>(cfg.element_kernels.size()) != data.theta_dim())
    throw Error(errc::dimension_mismatch,
                "need one element kernel per regressor dimension");
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda))
    throw Error(errc::config, "ridge weight must be non-negative");
}

}  // namespace

Mat gram(const RegressionData& data, const RowConfig& cfg) {
  check_config(data, cfg);
  const int N = data.size();
  const int nt = data.theta_dim();
  Mat G(N, N);
  for (int k = 0; k < N; ++k) {
    const Vec pk = data.param.row(k).transpose();
    for (int l = k; l < N; ++l) {
      const Vec pl = data.param.row(l).transpose();
      double acc = 0.0;
      for (int j = 0; j < nt; ++j)
        acc += data.theta(k, j) * data.theta(l, j) *
               kernel_eval(cfg.element_kernels[j], data.tau(k), pk,
                           data.tau(l), pl);
      G(k, l) = acc;
      G(l, k) = acc;
    }
  }
  return G;
}

Mat gram(const TransverseDataset& ds, const RowConfig& cfg) {
  return gram(flatten(ds), cfg);
}

RowFit fit_row(const RegressionData& data, const RowConfig& cfg,
               const Vec& z) {
  check_config(data, cfg);
  if (z.size() != data.size())
    throw Error(errc::dimension_mismatch, "target length mismatch");
  const int N = data.size();
  Mat G = gram(data, cfg);
  const double gscale = std::max(G.diagonal().cwiseAbs().maxCoeff(), 1.0);

  double jitter = 0.0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Mat A = G + (cfg.lambda + jitter) * Mat::Identity(N, N);
    Eigen::LLT<Mat> llt(A);
    if (llt.info() == Eigen::Success) {
      Vec alpha = llt.solve(z);
      // Backward-error criterion: achievable by a stable solve at any
      // conditioning, unlike a plain residual bound.
      const double anorm = A.cwiseAbs().rowwise().sum().maxCoeff();
      const double resid = (A * alpha - z).norm();
      if (resid <= 1e-12 * (anorm * alpha.norm() + z.norm())) {
        RowFit fit;
        fit.alpha = std::move(alpha);
        fit.jitter = jitter;
        return fit;
      }
    }
    jitter = (jitter == 0.0) ? 1e-12 * gscale : 10.0 * jitter;
  }
  throw Error(errc::numerical,
              "regularized Gram system unsolvable even with jitter");
}

RowFit fit_row(const TransverseDataset& ds, const RowConfig& cfg,
               const Vec& z) {
  return fit_row(flatten(ds), cfg, z);
}

double log_marglik(const RegressionData& data, const RowConfig& cfg,
                   const Vec& z) {
  check_config(data, cfg);
  if (z.size() != data.size())
    throw Error(errc::dimension_mismatch, "target length mismatch");
  const int N = data.size();
  Mat A = gram(data, cfg);
  A.diagonal().array() += cfg.lambda;
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success)
    throw Error(errc::numerical,
                "covariance not positive definite in likelihood evaluation");
  double logdet = 0.0;
  for (int i = 0; i < N; ++i) logdet += std::log(llt.matrixLLT()(i, i));
  logdet *= 2.0;
  const double quad = z.dot(llt.solve(z));
  return -0.5 * (quad + logdet + N * std::log(2.0 * M_PI));
}

double log_marglik(const TransverseDataset& ds, const RowConfig& cfg,
                   const Vec& z) {
  return log_marglik(flatten(ds), cfg, z);
}

IdentifiedModel::IdentifiedModel(std::vector<IdentifiedRow> rows,
                                 RegressionData train, int state_dim,
                                 int input_dim, int param_dim, double period)
    : rows_(std::move(rows)),
      train_(std::move(train)),
      state_dim_(state_dim),
      input_dim_(input_dim),
      param_dim_(param_dim),
      period_(period) {
  if (static_cast<int>(rows_.size()) != state_dim_)
    throw Error(errc::dimension_mismatch,
                "need one identified row per response dimension");
  for (const auto& r : rows_)
    if (r.alpha.size() != train_.size())
      throw Error(errc::dimension_mismatch,
                  "dual weights do not match the training set");
}

Vec IdentifiedModel::omega_row(int i, double tau, const Vec& p) const {
  const auto& row = rows_.at(i);
  const int N = train_.size();
  const int nt = theta_dim();
  Vec w = Vec::Zero(nt);
  for (int k = 0; k < N; ++k) {
    const double a = row.alpha(k);
    if (a == 0.0) continue;
    const Vec pk = train_.param.row(k).transpose();
    for (int j = 0; j < nt; ++j)
      w(j) += a * train_.theta(k, j) *
              kernel_eval(row.config.element_kernels[j], train_.tau(k), pk,
                          tau, p);
  }
  return w;
}

Mat IdentifiedModel::omega(double tau, const Vec& p) const {
  Mat W(state_dim_, theta_dim());
  for (int i = 0; i < state_dim_; ++i)
    W.row(i) = omega_row(i, tau, p).transpose();
  return W;
}

Vec IdentifiedModel::predict_zeta(const Vec& theta, double tau,
                                  const Vec& p) const {
  if (theta.size() != theta_dim())
    throw Error(errc::dimension_mismatch, "regressor dimension mismatch");
  return omega(tau, p) * theta;
}

}  // namespace lppv
