#include "lppv/hyperopt.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lppv/errors.hpp"

namespace lppv {

NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& fn,
                             const Vec& x0, const NelderMeadOptions& opts) {
  const int D = static_cast<int>(x0.size());
  std::vector<Vec> xs(D + 1);
  std::vector<double> fs(D + 1);
  int evals = 0;

  xs[0] = x0;
  fs[0] = fn(x0);
  ++evals;
  for (int i = 1; i <= D; ++i) {
    xs[i] = x0;
    xs[i](i - 1) += opts.init_step;
    fs[i] = fn(xs[i]);
    ++evals;
  }

  std::vector<int> order(D + 1);
  auto sort_simplex = [&] {
    for (int i = 0; i <= D; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fs[a] < fs[b]; });
  };

  while (evals < opts.max_evals) {
    sort_simplex();
    const int ib = order[0], iw = order[D], isw = order[D - 1];
    if (fs[iw] - fs[ib] < opts.ftol) break;

    Vec c = Vec::Zero(D);
    for (int i = 0; i <= D; ++i)
      if (i != iw) c += xs[i];
    c /= D;

    const Vec xr = c + (c - xs[iw]);
    const double fr = fn(xr);
    ++evals;

    if (fr < fs[ib]) {
      const Vec xe = c + 2.0 * (c - xs[iw]);
      const double fe = fn(xe);
      ++evals;
      if (fe < fr) {
        xs[iw] = xe;
        fs[iw] = fe;
      } else {
        xs[iw] = xr;
        fs[iw] = fr;
      }
    } else if (fr < fs[isw]) {
      xs[iw] = xr;
      fs[iw] = fr;
    } else if (fr < fs[iw]) {
      const Vec xc = c + 0.5 * (xr - c);  // outside contraction
      const double fc = fn(xc);
      ++evals;
      if (fc <= fr) {
        xs[iw] = xc;
        fs[iw] = fc;
      } else {
        for (int i = 0; i <= D; ++i)
          if (i != ib) {
            xs[i] = xs[ib] + 0.5 * (xs[i] - xs[ib]);
            fs[i] = fn(xs[i]);
            ++evals;
          }
      }
    } else {
      const Vec xc = c + 0.5 * (xs[iw] - c);  // inside contraction
      const double fc = fn(xc);
      ++evals;
      if (fc < fs[iw]) {
        xs[iw] = xc;
        fs[iw] = fc;
      } else {
        for (int i = 0; i <= D; ++i)
          if (i != ib) {
            xs[i] = xs[ib] + 0.5 * (xs[i] - xs[ib]);
            fs[i] = fn(xs[i]);
            ++evals;
          }
      }
    }
  }

  sort_simplex();
  NelderMeadResult res;
  res.x = xs[order[0]];
  res.f = fs[order[0]];
  res.evals = evals;
  return res;
}

namespace {

// Log-space packing of a RowConfig: all length scales, then the ridge
// weight, in a fixed order.
int pack_dim(const RowConfig& cfg) {
  int d = 1;  // lambda
  for (const auto& k : cfg.element_kernels) {
    d += 1;
    if (k.uses_param()) d += static_cast<int>(k.length_scale_p.size());
  }
  return d;
}

Vec pack(const RowConfig& cfg) {
  Vec q(pack_dim(cfg));
  int idx = 0;
  for (const auto& k : cfg.element_kernels) {
    q(idx++) = std::log(k.length_scale_tau);
    if (k.uses_param())
      for (int i = 0; i < k.length_scale_p.size(); ++i)
        q(idx++) = std::log(k.length_scale_p(i));
  }
  q(idx) = std::log(cfg.lambda);
  return q;
}

RowConfig unpack(const Vec& q, const RowConfig& proto) {
  RowConfig cfg = proto;
  int idx = 0;
  for (auto& k : cfg.element_kernels) {
    k.length_scale_tau = std::exp(q(idx++));
    if (k.uses_param())
      for (int i = 0; i < k.length_scale_p.size(); ++i)
        k.length_scale_p(i) = std::exp(q(idx++));
  }
  cfg.lambda = std::exp(q(idx));
  return cfg;
}

}  // namespace

HyperSearchResult optimize_hypers(const RegressionData& data, const Vec& z,
                                  const RowConfig& init,
                                  const HyperSearchOptions& opts) {
  const int D = pack_dim(init);
  const double ll_lo = std::log(opts.l_min), ll_hi = std::log(opts.l_max);
  const double lr_lo = std::log(opts.lambda_min),
               lr_hi = std::log(opts.lambda_max);

  auto objective = [&](const Vec& q) -> double {
    // Box penalty keeps the search inside the hyperparameter ranges the
    // kernels stay numerically sane in.
    double overshoot = 0.0;
    for (int i = 0; i < D; ++i) {
      const double lo = (i == D - 1) ? lr_lo : ll_lo;
      const double hi = (i == D - 1) ? lr_hi : ll_hi;
      if (q(i) < lo) overshoot += lo - q(i);
      if (q(i) > hi) overshoot += q(i) - hi;
    }
    if (overshoot > 0.0) return 1e10 * (1.0 + overshoot);
    try {
      return -log_marglik(data, unpack(q, init), z);
    } catch (const Error&) {
      return 1e12;
    }
  };

  // Draw every start upfront so the random stream never depends on how the
  // individual searches run.
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<Vec> start_points;
  start_points.push_back(pack(init));
  for (int s = 1; s < opts.starts; ++s) {
    Vec q(D);
    for (int i = 0; i < D; ++i) {
      const double lo = (i == D - 1) ? lr_lo : ll_lo;
      const double hi = (i == D - 1) ? lr_hi : ll_hi;
      q(i) = lo + (hi - lo) * uni(rng);
    }
    start_points.push_back(std::move(q));
  }

  const double f_init = objective(start_points[0]);
  HyperSearchResult best;
  best.config = init;
  best.objective = f_init;
  best.improved = false;
  best.evaluations = 1;

  NelderMeadOptions nm;
  nm.max_evals = std::max(2 * D + 2, opts.budget / std::max(opts.starts, 1));
  for (const auto& q0 : start_points) {
    NelderMeadResult r = nelder_mead(objective, q0, nm);
    best.evaluations += r.evals;
    if (r.f < best.objective) {
      best.objective = r.f;
      best.config = unpack(r.x, init);
      best.improved = r.f < f_init;
    }
  }
  return best;
}

HyperSearchResult optimize_hypers(const TransverseDataset& ds, int row,
                                  const RowConfig& init,
                                  const HyperSearchOptions& opts) {
  if (row < 0 || row >= ds.state_dim)
    throw Error(errc::config, "row index out of range");
  RegressionData data = flatten(ds);
  const Vec z = ds.zeta_matrix().col(row);
  return optimize_hypers(data, z, init, opts);
}

}  // namespace lppv
