#pragma once

#include <cstdint>
#include <vector>

#include "lppv/hyperopt.hpp"
#include "lppv/ode.hpp"

namespace lppv {

// Baseline that regresses the full-state vector field directly from data:
// kernel ridge regression per state-derivative channel with an anisotropic
// squared-exponential kernel over the stacked (state, input, parameter)
// regressor.  No cycle structure is used anywhere.
class BlackboxModel {
 public:
  struct Channel {
    Vec length_scales;  // one per regressor dimension
    double lambda = 1e-3;
    Vec alpha;
    double marglik = 0.0;
    int evaluations = 0;
  };

  BlackboxModel() = default;
  BlackboxModel(Mat inputs, std::vector<Channel> channels, int exogenous_dim)
      : inputs_(std::move(inputs)),
        channels_(std::move(channels)),
        exo_dim_(exogenous_dim) {}

  // inputs: N x m regressors; targets: N x n derivative samples.
  static BlackboxModel fit(const Mat& inputs, const Mat& targets,
                           const HyperSearchOptions& search);

  // Learned field value at a regressor point.
  Vec predict(const Vec& u) const;

  // Integrate the learned field  xdot = fhat([x; d; p])  from x0.
  Trajectory predict_trajectory(const Vec& x0, const InputFn& input,
                                const Vec& p, double t0, double t1,
                                double tol, const Vec& sample_times) const;

  int input_dim() const { return static_cast<int>(inputs_.cols()); }
  int output_dim() const { return static_cast<int>(channels_.size()); }
  int exogenous_dim() const { return exo_dim_; }
  const Mat& inputs() const { return inputs_; }
  const std::vector<Channel>& channels() const { return channels_; }

 private:
  Mat inputs_;
  std::vector<Channel> channels_;
  int exo_dim_ = 0;  // filled by predict_trajectory callers via fit metadata
  friend BlackboxModel fit_blackbox(const Mat&, const Mat&, int,
                                    const HyperSearchOptions&);
};

// Convenience wrapper that records how many regressor columns are exogenous
// input (between the state and the trailing parameters).
BlackboxModel fit_blackbox(const Mat& inputs, const Mat& targets,
                           int exogenous_dim, const HyperSearchOptions& search);

}  // namespace lppv
