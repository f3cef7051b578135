#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lppv/blackbox.hpp"
#include "lppv/config.hpp"
#include "lppv/kite_control.hpp"
#include "lppv/lppv_model.hpp"
#include "lppv/report.hpp"

namespace lppv {

// Fully assembled plant at one operating point: the system the data comes
// from (Van der Pol with its forcing input channel, or the gain-stabilized
// kite), its cycle and transverse surfaces, and for the kite the reference
// and gain behind the closed loop.
struct PlantSetup {
  std::string tag;
  OdeSystem system;
  LimitCycle cycle;
  SurfaceFamily surfaces;
  std::optional<KiteReference> reference;
  std::optional<LppvModel> openloop_linearization;
  std::optional<PeriodicLqr> lqr;
};

// vr is ignored for the Van der Pol system.  with_control = false skips the
// gain design (enough for cycle/surface artifacts).
PlantSetup build_plant(const ExperimentConfig& cfg, std::optional<double> vr,
                       bool with_control = true);

struct TrainingData {
  std::vector<PlantSetup> plants;
  std::vector<Trajectory> trajectories;  // after noise
  std::vector<int> plant_of_traj;
  TransverseDataset dataset;             // merged over all trajectories
  Mat blackbox_inputs;                   // same samples, [x (d) (p)] rows
  Mat blackbox_targets;                  // noisy state derivatives
};

TrainingData build_training_data(const ExperimentConfig& cfg);

struct IdentifyArtifacts {
  TrainingData data;
  IdentifyResult main;
  std::optional<IdentifyResult> med;  // single-operating-point side model
  std::optional<BlackboxModel> blackbox;
};

IdentifyArtifacts run_identify(const ExperimentConfig& cfg);

struct PredictArtifacts {
  PlantSetup plant;  // test operating point
  Vec xperp0;
  double tau0 = 0.0;
  Trajectory truth;
  Mat truth_xperp;
  Vec truth_tau;  // unwrapped
  std::vector<PredictionEntry> entries;
  PredictionReport report;
};

PredictArtifacts run_predict(const ExperimentConfig& cfg);

struct CompareArtifacts {
  Vec tau_grid;
  std::vector<Mat> model_omega;
  std::vector<Mat> oracle_omega;
  Mat rel_l2;       // per-element relative L2 error over the grid
  Mat oracle_rms;   // per-element RMS magnitude of the oracle
  double worst_significant = 0.0;
  double significance_floor = 1e-3;
};

CompareArtifacts run_compare(const ExperimentConfig& cfg);

// Transverse signals of a trajectory with the phase unwrapped across
// windings (truth side of prediction comparisons).
std::pair<Mat, Vec> transverse_signals(const Trajectory& traj,
                                       const SurfaceFamily& sf);

Vec linspace(double a, double b, int n);

}  // namespace lppv
