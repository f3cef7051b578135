#include "lppv/noise.hpp"

#include <cmath>
#include <random>

#include "lppv/errors.hpp"

namespace lppv {

NoiseSummary add_noise(Trajectory& traj, double snr_db, std::uint64_t seed) {
  if (!std::isfinite(snr_db))
    throw Error(errc::config, "signal-to-noise ratio must be finite");
  const int N = traj.size();
  const int n = traj.state_dim();
  if (N == 0) throw Error(errc::config, "cannot add noise to empty trajectory");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double gain = std::pow(10.0, -snr_db / 10.0);

  auto corrupt = [&](Mat& channel_major) {
    Vec sigma(n);
    for (int j = 0; j < n; ++j) {
      const double power = channel_major.col(j).squaredNorm() / N;
      const double s = std::sqrt(power * gain);
      sigma(j) = s;
      if (s == 0.0) continue;
      for (int i = 0; i < N; ++i) channel_major(i, j) += s * gauss(rng);
    }
    return sigma;
  };

  NoiseSummary out;
  out.sigma_states = corrupt(traj.states);
  out.sigma_derivs = corrupt(traj.derivs);
  return out;
}

}  // namespace lppv
