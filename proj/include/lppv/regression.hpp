#pragma once

#include <vector>

#include "lppv/kernels.hpp"
#include "lppv/transverse_map.hpp"

namespace lppv {

// Kernel and regularization choices for one output row of the model: one
// scalar kernel per regressor element (diagonal matrix-valued kernel) and a
// ridge weight.
struct RowConfig {
  std::vector<KernelSpec> element_kernels;
  double lambda = 1e-3;
};

// Flattened view of the training data used by the regression routines.
struct RegressionData {
  Mat theta;  // N x n_theta
  Vec tau;    // N
  Mat param;  // N x n_param
  int size() const { return static_cast<int>(tau.size()); }
  int theta_dim() const { return static_cast<int>(theta.cols()); }
};

RegressionData flatten(const TransverseDataset& ds);

// Regressor-weighted Gram matrix:
//   G(k, k') = theta_k^T diag_j(k_j(tau_k, tau_k')) theta_k'.
Mat gram(const RegressionData& data, const RowConfig& cfg);
Mat gram(const TransverseDataset& ds, const RowConfig& cfg);

struct RowFit {
  Vec alpha;
  double jitter = 0.0;  // diagonal boost that was needed (0 normally)
};

// Solve (G + lambda I) alpha = z by Cholesky, escalating a tiny diagonal
// jitter up to three times if the factorization or the residual check
// fails.  Throws Error("numerical") when the system stays unsolvable.
RowFit fit_row(const RegressionData& data, const RowConfig& cfg, const Vec& z);
RowFit fit_row(const TransverseDataset& ds, const RowConfig& cfg, const Vec& z);

// Log marginal likelihood of the targets under the Gaussian process prior
// with covariance G + lambda I:
//   -1/2 (z^T (G + lambda I)^{-1} z + logdet(G + lambda I) + N log 2 pi).
double log_marglik(const RegressionData& data, const RowConfig& cfg,
                   const Vec& z);
double log_marglik(const TransverseDataset& ds, const RowConfig& cfg,
                   const Vec& z);

struct IdentifiedRow {
  RowConfig config;
  Vec alpha;
};

// Kernel-regression model of the parameter-varying coefficient matrix: each
// output row i carries dual weights alpha_i over the training samples, so
//   omega_i(tau)_j = sum_k alpha_{i,k} theta(k, j) k_{i,j}(tau_k, tau).
class IdentifiedModel {
 public:
  IdentifiedModel() = default;
  IdentifiedModel(std::vector<IdentifiedRow> rows, RegressionData train,
                  int state_dim, int input_dim, int param_dim, double period);

  // Row i of the coefficient matrix at phase tau and parameter p.
  Vec omega_row(int i, double tau, const Vec& p = Vec()) const;
  // Full coefficient matrix, rows stacked.
  Mat omega(double tau, const Vec& p = Vec()) const;
  // Predicted response for a regressor theta at (tau, p).
  Vec predict_zeta(const Vec& theta, double tau, const Vec& p = Vec()) const;

  int state_dim() const { return state_dim_; }
  int input_dim() const { return input_dim_; }
  int param_dim() const { return param_dim_; }
  int theta_dim() const { return state_dim_ - 1 + input_dim_; }
  double period() const { return period_; }
  const std::vector<IdentifiedRow>& rows() const { return rows_; }
  const RegressionData& train() const { return train_; }

 private:
  std::vector<IdentifiedRow> rows_;
  RegressionData train_;
  int state_dim_ = 0, input_dim_ = 0, param_dim_ = 0;
  double period_ = 0.0;
};

}  // namespace lppv
