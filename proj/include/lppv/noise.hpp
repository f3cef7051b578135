#pragma once

#include <cstdint>

#include "lppv/ode.hpp"

namespace lppv {

// Standard deviations actually applied per channel by add_noise.
struct NoiseSummary {
  Vec sigma_states;
  Vec sigma_derivs;
};

// Add i.i.d. zero-mean Gaussian noise to the state and derivative channels
// of a trajectory at the requested signal-to-noise ratio.  The per-channel
// noise variance is the channel's mean-square signal power divided by
// 10^(snr_db/10); silent channels are left untouched.  Sample times and
// inputs are never perturbed.  Fully deterministic in `seed`.
NoiseSummary add_noise(Trajectory& traj, double snr_db, std::uint64_t seed);

}  // namespace lppv
