#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lppv/core.hpp"

namespace lppv {

// Experiment configuration, loaded from a strict JSON schema: unknown keys
// anywhere are rejected so typos fail loudly instead of silently running a
// different experiment.

struct ForcingConfig {
  double amplitude = 0.0;
  double omega_factor = 0.0;  // forcing frequency / cycle frequency
};

struct SystemConfig {
  std::string name;  // "vanderpol" | "kite"
  double mu = 1.0;   // vanderpol
  double omega = 0.8;
  double theta0 = M_PI / 4.0;
  double phi0 = M_PI / 4.0;
  std::vector<double> vr;  // kite training operating points
};

struct SurfacesConfig {
  std::string kind = "center";    // "center" | "orthogonal"
  std::string center = "origin";  // "origin" | "orbit-mean" | "explicit"
  Vec center_point;               // when center == "explicit"
  int grid_size = 512;
};

struct DatasetConfig {
  // Van der Pol: one trajectory per initial transverse offset.  Start
  // phases cycle through tau0 (scalar or list) per trajectory.
  std::vector<double> initial_xperp;
  std::vector<double> tau0 = {0.0};
  ForcingConfig forcing;
  // Kite: random initial conditions on a fixed offset radius.
  int n_trajectories = 8;
  double offset_norm = 0.02;
  // Shared.
  double duration_periods = 3.0;
  int samples_per_period = 200;
  std::optional<double> snr_db;
};

struct IdentificationConfig {
  bool multivariate = false;
  int budget = 640;
  double lambda_init = 1e-3;
  double length_scale_init = 1.0;
  bool feedback_as_input = false;
  bool fit_blackbox = false;
  std::optional<double> med_vr;  // extra single-operating-point model
};

struct ControlConfig {
  Mat q = Mat::Identity(2, 2);
  double r = 1.0;
};

struct ModelRef {
  std::string name;
  std::string path;
};

struct TestConfig {
  std::vector<double> initial_xperp;  // explicit offset (Van der Pol)
  std::optional<double> offset_norm;  // random direction at this radius
  std::optional<double> tau0;         // absent: drawn from the seed
  ForcingConfig forcing;
  double duration_periods = 2.0;
  int samples_per_period = 200;
  double vr = 0.0;  // kite test operating point
  std::vector<ModelRef> models;
  bool include_analytic = true;
  std::optional<std::string> blackbox_path;
};

struct CompareConfig {
  std::string model_path;
  int grid_points = 256;
  double vr = 0.0;  // kite: operating point of the oracle
};

struct ExperimentConfig {
  std::string label = "experiment";
  std::uint64_t seed = 0;
  bool has_seed = false;
  SystemConfig system;
  SurfacesConfig surfaces;
  DatasetConfig dataset;
  IdentificationConfig identification;
  ControlConfig control;
  TestConfig test;
  CompareConfig compare;
};

// Parse and validate a config file.  Throws Error("config") on schema
// violations and Error("io") on file problems.
ExperimentConfig load_config(const std::string& path);

}  // namespace lppv
