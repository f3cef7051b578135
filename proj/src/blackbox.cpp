#include "lppv/blackbox.hpp"

#include <cmath>
#include <random>

#include "lppv/errors.hpp"

namespace lppv {

namespace {

double ard_kernel(const Vec& a, const Vec& b, const Vec& ls) {
  double q = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    const double r = (a(i) - b(i)) / ls(i);
    q += r * r;
  }
  return std::exp(-0.5 * q);
}

Mat ard_gram(const Mat& X, const Vec& ls) {
  const int N = static_cast<int>(X.rows());
  Mat K(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      const double v =
          ard_kernel(X.row(i).transpose(), X.row(j).transpose(), ls);
      K(i, j) = v;
      K(j, i) = v;
    }
  return K;
}

double gaussian_log_evidence(Mat cov, const Vec& z) {
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success)
    throw Error(errc::numerical, "covariance not positive definite");
  double logdet = 0.0;
  const int N = static_cast<int>(z.size());
  for (int i = 0; i < N; ++i) logdet += std::log(llt.matrixLLT()(i, i));
  logdet *= 2.0;
  return -0.5 * (z.dot(llt.solve(z)) + logdet + N * std::log(2.0 * M_PI));
}

}  // namespace

BlackboxModel BlackboxModel::fit(const Mat& inputs, const Mat& targets,
                                 const HyperSearchOptions& search) {
  const int N = static_cast<int>(inputs.rows());
  const int m = static_cast<int>(inputs.cols());
  const int n = static_cast<int>(targets.cols());
  if (targets.rows() != N)
    throw Error(errc::dimension_mismatch, "inputs/targets length mismatch");
  if (N < 2) throw Error(errc::dataset_degenerate, "too few samples");

  // Data-driven starting point: length scale = spread per input dimension.
  Vec ls0(m);
  for (int i = 0; i < m; ++i) {
    const double sd = std::sqrt(
        (inputs.col(i).array() - inputs.col(i).mean()).square().mean());
    ls0(i) = std::max(sd, 1e-2);
  }

  const double ll_lo = std::log(search.l_min), ll_hi = std::log(search.l_max);
  const double lr_lo = std::log(search.lambda_min),
               lr_hi = std::log(search.lambda_max);
  const int D = m + 1;

  BlackboxModel model;
  model.inputs_ = inputs;
  for (int c = 0; c < n; ++c) {
    const Vec z = targets.col(c);
    auto objective = [&](const Vec& q) -> double {
      double overshoot = 0.0;
      for (int i = 0; i < D; ++i) {
        const double lo = (i == D - 1) ? lr_lo : ll_lo;
        const double hi = (i == D - 1) ? lr_hi : ll_hi;
        if (q(i) < lo) overshoot += lo - q(i);
        if (q(i) > hi) overshoot += q(i) - hi;
      }
      if (overshoot > 0.0) return 1e10 * (1.0 + overshoot);
      Vec ls = q.head(m).array().exp();
      Mat cov = ard_gram(inputs, ls);
      cov.diagonal().array() += std::exp(q(m));
      try {
        return -gaussian_log_evidence(std::move(cov), z);
      } catch (const Error&) {
        return 1e12;
      }
    };

    Vec q0(D);
    q0.head(m) = ls0.array().log();
    q0(m) = std::log(1e-3);

    std::mt19937_64 rng(search.seed + 7919ULL * static_cast<std::uint64_t>(c));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Vec> starts{q0};
    for (int s = 1; s < search.starts; ++s) {
      Vec q(D);
      for (int i = 0; i < D; ++i) {
        const double lo = (i == D - 1) ? lr_lo : ll_lo;
        const double hi = (i == D - 1) ? lr_hi : ll_hi;
        q(i) = lo + (hi - lo) * uni(rng);
      }
      starts.push_back(std::move(q));
    }

    NelderMeadOptions nm;
    nm.max_evals =
        std::max(2 * D + 2, search.budget / std::max(search.starts, 1));
    Vec best_q = q0;
    double best_f = objective(q0);
    int evals = 1;
    for (const auto& s : starts) {
      NelderMeadResult r = nelder_mead(objective, s, nm);
      evals += r.evals;
      if (r.f < best_f) {
        best_f = r.f;
        best_q = r.x;
      }
    }

    Channel ch;
    ch.length_scales = best_q.head(m).array().exp();
    ch.lambda = std::exp(best_q(m));
    Mat cov = ard_gram(inputs, ch.length_scales);
    cov.diagonal().array() += ch.lambda;
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success) {
      cov.diagonal().array() += 1e-10 * cov.diagonal().maxCoeff();
      llt.compute(cov);
      if (llt.info() != Eigen::Success)
        throw Error(errc::numerical, "baseline covariance unsolvable");
    }
    ch.alpha = llt.solve(z);
    ch.marglik = -best_f;
    ch.evaluations = evals;
    model.channels_.push_back(std::move(ch));
  }
  return model;
}

BlackboxModel fit_blackbox(const Mat& inputs, const Mat& targets,
                           int exogenous_dim,
                           const HyperSearchOptions& search) {
  BlackboxModel m = BlackboxModel::fit(inputs, targets, search);
  m.exo_dim_ = exogenous_dim;
  return m;
}

Vec BlackboxModel::predict(const Vec& u) const {
  if (u.size() != input_dim())
    throw Error(errc::dimension_mismatch, "regressor dimension mismatch");
  const int N = static_cast<int>(inputs_.rows());
  Vec out(output_dim());
  for (int c = 0; c < output_dim(); ++c) {
    const Channel& ch = channels_[c];
    double acc = 0.0;
    for (int k = 0; k < N; ++k)
      acc += ch.alpha(k) *
             ard_kernel(inputs_.row(k).transpose(), u, ch.length_scales);
    out(c) = acc;
  }
  return out;
}

Trajectory BlackboxModel::predict_trajectory(const Vec& x0,
                                             const InputFn& input,
                                             const Vec& p, double t0,
                                             double t1, double tol,
                                             const Vec& sample_times) const {
  const int n = output_dim();
  const int nd = exo_dim_;
  if (x0.size() != n)
    throw Error(errc::dimension_mismatch, "initial state dimension mismatch");
  if (n + nd + p.size() != input_dim())
    throw Error(errc::dimension_mismatch,
                "state/input/parameter split does not match the regressor");

  OdeSystem sys;
  sys.state_dim = n;
  sys.input_dim = nd;
  sys.rhs = [this, &p, n, nd](const Vec& x, const Vec& d, double) {
    Vec u(input_dim());
    u.head(n) = x;
    if (nd > 0) u.segment(n, nd) = d;
    if (p.size() > 0) u.tail(p.size()) = p;
    return predict(u);
  };

  return (sample_times.size() > 0)
             ? integrate_sampled(sys, x0, input, t0, t1, tol, sample_times)
             : integrate(sys, x0, input, t0, t1, tol);
}

}  // namespace lppv
