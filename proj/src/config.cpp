#include "lppv/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "lppv/errors.hpp"

namespace lppv {

namespace {

using Json = nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(errc::config, "config " + where + ": " + what);
}

void check_keys(const Json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.count(key)) bad(where, "unknown key '" + key + "'");
}

double num(const Json& obj, const std::string& where, const char* key,
           double fallback, bool required = false) {
  if (!obj.contains(key)) {
    if (required) bad(where, std::string("missing key '") + key + "'");
    return fallback;
  }
  if (!obj[key].is_number()) bad(where + "." + key, "expected a number");
  return obj[key];
}

int integer(const Json& obj, const std::string& where, const char* key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) bad(where + "." + key, "expected an integer");
  return obj[key];
}

bool boolean(const Json& obj, const std::string& where, const char* key,
             bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) bad(where + "." + key, "expected a boolean");
  return obj[key];
}

std::string text(const Json& obj, const std::string& where, const char* key,
                 const std::string& fallback, bool required = false) {
  if (!obj.contains(key)) {
    if (required) bad(where, std::string("missing key '") + key + "'");
    return fallback;
  }
  if (!obj[key].is_string()) bad(where + "." + key, "expected a string");
  return obj[key];
}

std::vector<double> num_list(const Json& obj, const std::string& where,
                             const char* key) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  if (!obj[key].is_array()) bad(where + "." + key, "expected an array");
  for (const auto& v : obj[key]) {
    if (!v.is_number()) bad(where + "." + key, "expected numbers");
    out.push_back(v);
  }
  return out;
}

ForcingConfig parse_forcing(const Json& j, const std::string& where) {
  ForcingConfig f;
  if (!j.contains("forcing")) return f;
  const Json& fj = j["forcing"];
  check_keys(fj, where + ".forcing", {"amplitude", "omega_factor"});
  f.amplitude = num(fj, where + ".forcing", "amplitude", 0.0, true);
  f.omega_factor = num(fj, where + ".forcing", "omega_factor", 0.0, true);
  return f;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(errc::io, "cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(is);
  } catch (const std::exception& e) {
    throw Error(errc::config,
                "malformed JSON in '" + path + "': " + e.what());
  }

  check_keys(j, "root",
             {"schema_version", "label", "seed", "system", "surfaces",
              "dataset", "identification", "control", "test", "compare"});
  if (integer(j, "root", "schema_version", 0) != 1)
    bad("root", "schema_version must be 1");

  ExperimentConfig cfg;
  cfg.label = text(j, "root", "label", "experiment");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned())
      bad("root.seed", "expected a non-negative integer");
    cfg.seed = j["seed"];
    cfg.has_seed = true;
  }

  if (!j.contains("system")) bad("root", "missing key 'system'");
  {
    const Json& sj = j["system"];
    check_keys(sj, "system", {"name", "mu", "omega", "theta0", "phi0", "vr"});
    cfg.system.name = text(sj, "system", "name", "", true);
    if (cfg.system.name == "vanderpol") {
      cfg.system.mu = num(sj, "system", "mu", 1.0);
      if (sj.contains("omega") || sj.contains("vr"))
        bad("system", "kite keys given for a vanderpol system");
    } else if (cfg.system.name == "kite") {
      cfg.system.omega = num(sj, "system", "omega", 0.8);
      cfg.system.theta0 = num(sj, "system", "theta0", M_PI / 4.0);
      cfg.system.phi0 = num(sj, "system", "phi0", M_PI / 4.0);
      cfg.system.vr = num_list(sj, "system", "vr");
      if (sj.contains("mu")) bad("system", "'mu' is not a kite parameter");
    } else {
      bad("system.name", "must be 'vanderpol' or 'kite'");
    }
  }

  if (j.contains("surfaces")) {
    const Json& sj = j["surfaces"];
    check_keys(sj, "surfaces", {"kind", "center", "grid_size"});
    cfg.surfaces.kind = text(sj, "surfaces", "kind", "center");
    if (cfg.surfaces.kind != "center" && cfg.surfaces.kind != "orthogonal")
      bad("surfaces.kind", "must be 'center' or 'orthogonal'");
    cfg.surfaces.grid_size = integer(sj, "surfaces", "grid_size", 512);
    if (cfg.surfaces.grid_size < 8)
      bad("surfaces.grid_size", "must be at least 8");
    if (sj.contains("center")) {
      if (sj["center"].is_string()) {
        cfg.surfaces.center = sj["center"];
        if (cfg.surfaces.center != "origin" &&
            cfg.surfaces.center != "orbit-mean")
          bad("surfaces.center", "must be 'origin', 'orbit-mean' or an array");
      } else if (sj["center"].is_array()) {
        cfg.surfaces.center = "explicit";
        auto vals = num_list(sj, "surfaces", "center");
        cfg.surfaces.center_point =
            Eigen::Map<Vec>(vals.data(), static_cast<long>(vals.size()));
      } else {
        bad("surfaces.center", "must be 'origin', 'orbit-mean' or an array");
      }
    }
  }

  if (j.contains("dataset")) {
    const Json& dj = j["dataset"];
    check_keys(dj, "dataset",
               {"initial_xperp", "tau0", "forcing", "n_trajectories",
                "offset_norm", "duration_periods", "samples_per_period",
                "snr_db"});
    cfg.dataset.initial_xperp = num_list(dj, "dataset", "initial_xperp");
    if (dj.contains("tau0")) {
      if (dj["tau0"].is_array()) {
        cfg.dataset.tau0 = num_list(dj, "dataset", "tau0");
        if (cfg.dataset.tau0.empty())
          bad("dataset.tau0", "must not be an empty list");
      } else {
        cfg.dataset.tau0 = {num(dj, "dataset", "tau0", 0.0)};
      }
    }
    cfg.dataset.forcing = parse_forcing(dj, "dataset");
    cfg.dataset.n_trajectories = integer(dj, "dataset", "n_trajectories", 8);
    cfg.dataset.offset_norm = num(dj, "dataset", "offset_norm", 0.02);
    cfg.dataset.duration_periods =
        num(dj, "dataset", "duration_periods", 3.0);
    cfg.dataset.samples_per_period =
        integer(dj, "dataset", "samples_per_period", 200);
    if (dj.contains("snr_db"))
      cfg.dataset.snr_db = num(dj, "dataset", "snr_db", 0.0, true);
  }

  if (j.contains("identification")) {
    const Json& ij = j["identification"];
    check_keys(ij, "identification",
               {"multivariate", "budget", "lambda_init", "length_scale_init",
                "feedback_as_input", "fit_blackbox", "med_vr"});
    cfg.identification.multivariate =
        boolean(ij, "identification", "multivariate", false);
    cfg.identification.budget = integer(ij, "identification", "budget", 640);
    cfg.identification.lambda_init =
        num(ij, "identification", "lambda_init", 1e-3);
    cfg.identification.length_scale_init =
        num(ij, "identification", "length_scale_init", 1.0);
    cfg.identification.feedback_as_input =
        boolean(ij, "identification", "feedback_as_input", false);
    cfg.identification.fit_blackbox =
        boolean(ij, "identification", "fit_blackbox", false);
    if (ij.contains("med_vr"))
      cfg.identification.med_vr = num(ij, "identification", "med_vr", 0.0, true);
  }

  if (j.contains("control")) {
    const Json& cj = j["control"];
    check_keys(cj, "control", {"q", "r"});
    if (cj.contains("q")) {
      if (!cj["q"].is_array()) bad("control.q", "expected a matrix");
      const int rows = static_cast<int>(cj["q"].size());
      Mat q(rows, rows);
      for (int i = 0; i < rows; ++i) {
        if (!cj["q"][i].is_array() ||
            static_cast<int>(cj["q"][i].size()) != rows)
          bad("control.q", "expected a square matrix");
        for (int k = 0; k < rows; ++k) {
          if (!cj["q"][i][k].is_number()) bad("control.q", "expected numbers");
          q(i, k) = cj["q"][i][k];
        }
      }
      cfg.control.q = q;
    }
    cfg.control.r = num(cj, "control", "r", 1.0);
  }

  if (j.contains("test")) {
    const Json& tj = j["test"];
    check_keys(tj, "test",
               {"initial_xperp", "offset_norm", "tau0", "forcing",
                "duration_periods", "samples_per_period", "vr", "models",
                "include_analytic", "blackbox_path"});
    cfg.test.initial_xperp = num_list(tj, "test", "initial_xperp");
    if (tj.contains("offset_norm"))
      cfg.test.offset_norm = num(tj, "test", "offset_norm", 0.0, true);
    if (tj.contains("tau0")) cfg.test.tau0 = num(tj, "test", "tau0", 0.0, true);
    cfg.test.forcing = parse_forcing(tj, "test");
    cfg.test.duration_periods = num(tj, "test", "duration_periods", 2.0);
    cfg.test.samples_per_period =
        integer(tj, "test", "samples_per_period", 200);
    cfg.test.vr = num(tj, "test", "vr", 0.0);
    cfg.test.include_analytic =
        boolean(tj, "test", "include_analytic", true);
    if (tj.contains("blackbox_path"))
      cfg.test.blackbox_path = text(tj, "test", "blackbox_path", "", true);
    if (tj.contains("models")) {
      if (!tj["models"].is_array()) bad("test.models", "expected an array");
      for (const auto& mj : tj["models"]) {
        check_keys(mj, "test.models[]", {"name", "path"});
        ModelRef ref;
        ref.name = text(mj, "test.models[]", "name", "", true);
        ref.path = text(mj, "test.models[]", "path", "", true);
        cfg.test.models.push_back(std::move(ref));
      }
    }
  }

  if (j.contains("compare")) {
    const Json& cj = j["compare"];
    check_keys(cj, "compare", {"model_path", "grid_points", "vr"});
    cfg.compare.model_path = text(cj, "compare", "model_path", "", true);
    cfg.compare.grid_points = integer(cj, "compare", "grid_points", 256);
    cfg.compare.vr = num(cj, "compare", "vr", 0.0);
  }

  // Randomness without a seed would make reruns unrepeatable.
  const bool wants_noise = cfg.dataset.snr_db.has_value();
  const bool wants_random =
      cfg.system.name == "kite" || cfg.test.offset_norm.has_value();
  if ((wants_noise || wants_random) && !cfg.has_seed)
    bad("root", "a seed is required when noise or random initial "
                "conditions are requested");
  return cfg;
}

}  // namespace lppv
