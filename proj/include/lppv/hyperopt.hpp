#pragma once

#include <cstdint>
#include <functional>

#include "lppv/regression.hpp"

namespace lppv {

struct NelderMeadOptions {
  int max_evals = 80;
  double init_step = 0.4;  // simplex edge in (log-)coordinates
  double ftol = 1e-9;      // stop when the simplex value spread drops below
};

struct NelderMeadResult {
  Vec x;
  double f = 0.0;
  int evals = 0;
};

// Plain downhill-simplex minimizer.  Deterministic: no restarts, no
// randomness, fixed standard coefficients.
NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& fn,
                             const Vec& x0, const NelderMeadOptions& opts);

struct HyperSearchOptions {
  int budget = 640;   // total objective evaluations across all starts
  int starts = 8;     // multi-start count (start 0 = supplied init)
  std::uint64_t seed = 20220316ULL;
  double l_min = 1e-2, l_max = 1e2;          // length-scale box
  double lambda_min = 1e-8, lambda_max = 1e2;  // ridge-weight box
};

struct HyperSearchResult {
  RowConfig config;
  double objective = 0.0;  // negative log marginal likelihood at the optimum
  bool improved = false;   // strictly better than the supplied init
  int evaluations = 0;
};

// Empirical-Bayes hyperparameter selection for one output row: maximize the
// log marginal likelihood over all length scales and the ridge weight in
// log space, by multi-start Nelder-Mead inside the search box.  Start 0 is
// the supplied configuration; further starts are drawn log-uniformly in the
// box from the seeded generator.  When nothing beats the init, the init is
// returned with improved = false.
HyperSearchResult optimize_hypers(const TransverseDataset& ds, int row,
                                  const RowConfig& init,
                                  const HyperSearchOptions& opts = {});
HyperSearchResult optimize_hypers(const RegressionData& data, const Vec& z,
                                  const RowConfig& init,
                                  const HyperSearchOptions& opts = {});

}  // namespace lppv
