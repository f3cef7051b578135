// Command-line front end: limit-cycle / identify / predict / compare-omega,
// each driven by a JSON config and writing its artifacts into --out.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lppv/csv_io.hpp"
#include "lppv/errors.hpp"
#include "lppv/experiments.hpp"
#include "lppv/serialize.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace lppv;

namespace {

struct Args {
  std::string config;
  std::string out;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(errc::io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json cycle_summary(const PlantSetup& plant) {
  json j;
  j["tag"] = plant.tag;
  j["period"] = plant.cycle.period;
  j["grid_size"] = plant.cycle.grid_size();
  j["state_dim"] = plant.cycle.state_dim();
  j["transversality_margin"] = plant.surfaces.transversality_margin();
  if (plant.reference) {
    j["reference"] = {{"amplitude", plant.reference->amplitude},
                      {"phase", plant.reference->phase},
                      {"omega", plant.reference->omega},
                      {"vr", plant.reference->vr}};
  }
  return j;
}

void write_plant_artifacts(const fs::path& dir, const PlantSetup& plant,
                           bool with_gain) {
  save_cycle_json((dir / ("cycle_" + plant.tag + ".json")).string(),
                  plant.cycle);
  write_cycle_csv((dir / ("cycle_" + plant.tag + ".csv")).string(),
                  plant.cycle);
  write_surface_csv((dir / ("surfaces_" + plant.tag + ".csv")).string(),
                    plant.surfaces);
  if (plant.reference)
    write_reference_csv((dir / ("reference_" + plant.tag + ".csv")).string(),
                        *plant.reference, plant.cycle);
  if (with_gain && plant.lqr)
    write_gain_csv((dir / ("gain_" + plant.tag + ".csv")).string(), *plant.lqr,
                   plant.cycle.period);
}

int cmd_limit_cycle(const Args& args) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load_config(args.config);
  const fs::path dir(args.out);
  fs::create_directories(dir);

  std::vector<PlantSetup> plants;
  if (cfg.system.name == "kite") {
    if (cfg.system.vr.empty())
      throw Error(errc::config, "kite runs need system.vr operating points");
    for (double v : cfg.system.vr)
      plants.push_back(build_plant(cfg, v, /*with_control=*/false));
  } else {
    plants.push_back(build_plant(cfg, std::nullopt, /*with_control=*/false));
  }

  json summary;
  summary["label"] = cfg.label;
  summary["system"] = cfg.system.name;
  summary["surfaces"] = cfg.surfaces.kind;
  summary["cycles"] = json::array();
  for (const PlantSetup& plant : plants) {
    write_plant_artifacts(dir, plant, /*with_gain=*/false);
    summary["cycles"].push_back(cycle_summary(plant));
    std::printf("cycle %-12s period %.12g  margin %.3g\n", plant.tag.c_str(),
                plant.cycle.period, plant.surfaces.transversality_margin());
  }
  write_json_file(dir / "limit_cycle.json", summary);
  std::printf("limit-cycle done in %.1f s\n", seconds_since(t0));
  return 0;
}

json row_log_json(const std::vector<RowLog>& log) {
  json rows = json::array();
  for (const RowLog& r : log) {
    json jr;
    jr["row"] = r.row;
    jr["lambda"] = r.config.lambda;
    json kernels = json::array();
    for (const KernelSpec& k : r.config.element_kernels) {
      json jk;
      jk["kind"] = kernel_kind_name(k.kind);
      jk["length_scale_tau"] = k.length_scale_tau;
      if (k.uses_param()) jk["length_scale_p"] = k.length_scale_p;
      kernels.push_back(jk);
    }
    jr["kernels"] = kernels;
    jr["log_marginal_likelihood"] = r.marglik;
    jr["improved_over_init"] = r.improved;
    jr["evaluations"] = r.evaluations;
    jr["jitter"] = r.jitter;
    rows.push_back(jr);
  }
  return rows;
}

int cmd_identify(const Args& args) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load_config(args.config);
  const fs::path dir(args.out);
  fs::create_directories(dir);

  const IdentifyArtifacts art = run_identify(cfg);

  for (const PlantSetup& plant : art.data.plants)
    write_plant_artifacts(dir, plant, /*with_gain=*/true);
  for (std::size_t k = 0; k < art.data.trajectories.size(); ++k)
    write_trajectory_csv((dir / ("traj_" + std::to_string(k) + ".csv")).string(),
                         art.data.trajectories[k]);
  write_dataset_csv((dir / "dataset.csv").string(), art.data.dataset);
  save_model_json((dir / "model.json").string(), art.main.model);
  if (art.med) save_model_json((dir / "model_med.json").string(),
                               art.med->model);
  if (art.blackbox)
    save_blackbox_json((dir / "blackbox.json").string(), *art.blackbox);

  json hyper;
  hyper["label"] = cfg.label;
  hyper["rows"] = row_log_json(art.main.log);
  if (art.med) hyper["med_rows"] = row_log_json(art.med->log);
  if (art.blackbox) {
    json channels = json::array();
    for (const BlackboxModel::Channel& c : art.blackbox->channels()) {
      json jc;
      jc["length_scales"] = std::vector<double>(
          c.length_scales.data(), c.length_scales.data() + c.length_scales.size());
      jc["lambda"] = c.lambda;
      jc["log_marginal_likelihood"] = c.marglik;
      jc["evaluations"] = c.evaluations;
      channels.push_back(jc);
    }
    hyper["blackbox_channels"] = channels;
  }
  write_json_file(dir / "hyperparams.json", hyper);

  json summary;
  summary["label"] = cfg.label;
  summary["system"] = cfg.system.name;
  summary["n_trajectories"] = art.data.trajectories.size();
  summary["n_samples"] = art.data.dataset.size();
  summary["dropped_samples"] = art.data.dataset.dropped;
  summary["theta_dim"] = art.data.dataset.theta_dim();
  summary["param_dim"] = art.data.dataset.param_dim;
  summary["multivariate"] = cfg.identification.multivariate;
  summary["cycles"] = json::array();
  for (const PlantSetup& plant : art.data.plants)
    summary["cycles"].push_back(cycle_summary(plant));
  write_json_file(dir / "identify.json", summary);

  for (const RowLog& r : art.main.log)
    std::printf("row %d: marglik %.6g  lambda %.3g  evals %d\n", r.row,
                r.marglik, r.config.lambda, r.evaluations);
  std::printf("identify done: %d samples (%d dropped) in %.1f s\n",
              art.data.dataset.size(), art.data.dataset.dropped,
              seconds_since(t0));
  return 0;
}

int cmd_predict(const Args& args) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load_config(args.config);
  const fs::path dir(args.out);
  fs::create_directories(dir);

  const PredictArtifacts art = run_predict(cfg);

  for (const PredictionEntry& e : art.entries)
    write_prediction_csv((dir / ("prediction_" + e.name + ".csv")).string(),
                         art.truth.times, art.truth.states, e.states, e.xperp,
                         e.tau);

  json report;
  report["label"] = cfg.label;
  report["tau0"] = art.tau0;
  report["xperp0"] = std::vector<double>(
      art.xperp0.data(), art.xperp0.data() + art.xperp0.size());
  report["rows"] = json::array();
  for (const ReportRow& r : art.report.rows) {
    json jr;
    jr["name"] = r.name;
    jr["rmse_state"] = r.rmse_state;
    if (r.has_transverse) jr["rmse_transverse"] = r.rmse_transverse;
    report["rows"].push_back(jr);
  }
  write_json_file(dir / "report.json", report);
  {
    std::ofstream txt(dir / "report.txt", std::ios::binary);
    if (!txt) throw Error(errc::io, "cannot write report.txt");
    txt << art.report.table();
  }

  std::fputs(art.report.table().c_str(), stdout);
  std::printf("predict done in %.1f s\n", seconds_since(t0));
  return 0;
}

int cmd_compare(const Args& args) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load_config(args.config);
  const fs::path dir(args.out);
  fs::create_directories(dir);

  const CompareArtifacts art = run_compare(cfg);

  write_compare_csv((dir / "compare_omega.csv").string(), art.tau_grid,
                    art.model_omega, art.oracle_omega);

  json summary;
  summary["label"] = cfg.label;
  summary["grid_points"] = static_cast<int>(art.tau_grid.size());
  summary["significance_floor"] = art.significance_floor;
  summary["worst_significant_rel_l2"] = art.worst_significant;
  summary["elements"] = json::array();
  for (int i = 0; i < art.rel_l2.rows(); ++i) {
    for (int j = 0; j < art.rel_l2.cols(); ++j) {
      json je;
      je["row"] = i;
      je["col"] = j;
      je["rel_l2"] = art.rel_l2(i, j);
      je["oracle_rms"] = art.oracle_rms(i, j);
      je["significant"] = art.oracle_rms(i, j) >= art.significance_floor;
      summary["elements"].push_back(je);
    }
  }
  write_json_file(dir / "compare_omega.json", summary);

  std::printf("worst significant relative L2 error: %.4g\n",
              art.worst_significant);
  std::printf("compare-omega done in %.1f s\n", seconds_since(t0));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local limit-cycle dynamics toolkit"};
  app.require_subcommand(1);

  Args args;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config, "experiment config (JSON)")
        ->required();
    sub->add_option("--out", args.out, "output directory")->required();
  };
  CLI::App* lc = app.add_subcommand(
      "limit-cycle", "locate the cycle and build transverse surfaces");
  CLI::App* id = app.add_subcommand(
      "identify", "generate data and fit the coefficient model");
  CLI::App* pr = app.add_subcommand(
      "predict", "roll models forward against a fresh trajectory");
  CLI::App* co = app.add_subcommand(
      "compare-omega", "compare model coefficients against the linearization");
  for (CLI::App* sub : {lc, id, pr, co}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    json err;
    err["error"] = {{"category", errc::config}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  }

  try {
    if (lc->parsed()) return cmd_limit_cycle(args);
    if (id->parsed()) return cmd_identify(args);
    if (pr->parsed()) return cmd_predict(args);
    return cmd_compare(args);
  } catch (const Error& e) {
    json err;
    err["error"] = {{"category", e.category()}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    json err;
    err["error"] = {{"category", "internal"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
}
