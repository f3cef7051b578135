#include "lppv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <utility>

#include "lppv/benchmarks.hpp"
#include "lppv/errors.hpp"
#include "lppv/noise.hpp"
#include "lppv/serialize.hpp"

namespace lppv {

namespace {

Vec resolve_center(const SurfacesConfig& sc, const LimitCycle& cycle) {
  const int n = cycle.state_dim();
  if (sc.center == "origin") return Vec::Zero(n);
  if (sc.center == "orbit-mean")
    return cycle.states.colwise().mean().transpose();
  if (sc.center == "explicit") {
    if (sc.center_point.size() != n)
      throw Error(errc::config, "explicit surface center must have " +
                                    std::to_string(n) + " components");
    return sc.center_point;
  }
  throw Error(errc::config, "unknown surface center mode '" + sc.center + "'");
}

SurfaceFamily build_surfaces_for(const SurfacesConfig& sc,
                                 const LimitCycle& cycle) {
  if (sc.kind == "orthogonal") return build_orthogonal_surfaces(cycle);
  if (sc.kind == "center")
    return build_center_surfaces(cycle, resolve_center(sc, cycle));
  throw Error(errc::config, "unknown surface kind '" + sc.kind + "'");
}

InputFn make_forcing(const ForcingConfig& fc, double period) {
  if (fc.amplitude == 0.0) return InputFn();
  return sine_input(fc.amplitude, fc.omega_factor * 2.0 * M_PI / period);
}

int sample_count(double duration_periods, int samples_per_period) {
  const int n = static_cast<int>(std::lround(duration_periods *
                                             samples_per_period));
  return std::max(n, 2) + 1;
}

Mat blackbox_block(const Trajectory& traj, const Vec& p) {
  const int n = traj.state_dim();
  const int nd = traj.input_dim();
  const int np = static_cast<int>(p.size());
  Mat block(traj.size(), n + nd + np);
  block.leftCols(n) = traj.states;
  if (nd > 0) block.middleCols(n, nd) = traj.inputs;
  if (np > 0)
    block.rightCols(np) = p.transpose().replicate(traj.size(), 1);
  return block;
}

void append_rows(Mat& dst, const Mat& block) {
  if (dst.size() == 0) {
    dst = block;
    return;
  }
  if (dst.cols() != block.cols())
    throw Error(errc::dimension_mismatch,
                "trajectory feature blocks have inconsistent widths");
  const Eigen::Index old_rows = dst.rows();
  dst.conservativeResize(old_rows + block.rows(), Eigen::NoChange);
  dst.bottomRows(block.rows()) = block;
}

}  // namespace

Vec linspace(double a, double b, int n) {
  if (n < 2) throw Error(errc::config, "a sample grid needs at least 2 points");
  Vec out(n);
  for (int i = 0; i < n; ++i)
    out(i) = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

PlantSetup build_plant(const ExperimentConfig& cfg, std::optional<double> vr,
                       bool with_control) {
  PlantSetup out;
  if (cfg.system.name == "vanderpol") {
    out.tag = "vanderpol";
    out.system = make_vanderpol(cfg.system.mu);
    Vec x0(2);
    x0 << 2.0, 0.0;
    LimitCycleOptions lc;
    lc.grid_size = cfg.surfaces.grid_size;
    out.cycle = find_limit_cycle(out.system, x0, lc);
    out.surfaces = build_surfaces_for(cfg.surfaces, out.cycle);
    return out;
  }
  if (cfg.system.name != "kite")
    throw Error(errc::config, "unknown system '" + cfg.system.name + "'");

  const double v = vr.value_or(cfg.system.vr.empty() ? 0.0
                                                     : cfg.system.vr.front());
  if (!(v > 0.0))
    throw Error(errc::config, "kite speed ratio must be positive");
  char tag[32];
  std::snprintf(tag, sizeof tag, "vr%g", v);
  out.tag = tag;
  out.reference =
      build_reference(cfg.system.omega, cfg.system.theta0, cfg.system.phi0, v);
  out.cycle = reference_cycle(*out.reference, cfg.surfaces.grid_size);
  out.surfaces = build_surfaces_for(cfg.surfaces, out.cycle);
  if (!with_control) {
    out.system = kite_feedforward_system(*out.reference);
    return out;
  }
  OdeSystem open = kite_openloop_transverse(*out.reference, out.surfaces);
  out.openloop_linearization = linearization_model(open, out.surfaces);
  out.lqr = solve_periodic_lqr(*out.openloop_linearization, cfg.control.q,
                               cfg.control.r);
  out.system = kite_closed_loop(*out.reference, out.surfaces, *out.lqr);
  return out;
}

TrainingData build_training_data(const ExperimentConfig& cfg) {
  TrainingData out;
  bool first = true;
  auto merge = [&](TransverseDataset ds) {
    if (first) {
      out.dataset = std::move(ds);
      first = false;
    } else {
      out.dataset.append(ds);
    }
  };

  if (cfg.system.name == "vanderpol") {
    out.plants.push_back(build_plant(cfg, std::nullopt));
    const PlantSetup& plant = out.plants.front();
    const double T = plant.cycle.period;
    if (cfg.dataset.initial_xperp.empty())
      throw Error(errc::config,
                  "vanderpol training needs dataset.initial_xperp offsets");
    const Vec times =
        linspace(0.0, cfg.dataset.duration_periods * T,
                 sample_count(cfg.dataset.duration_periods,
                              cfg.dataset.samples_per_period));
    const InputFn input = make_forcing(cfg.dataset.forcing, T);
    for (std::size_t k = 0; k < cfg.dataset.initial_xperp.size(); ++k) {
      Vec xp(1);
      xp << cfg.dataset.initial_xperp[k];
      const double tau0 =
          cfg.dataset.tau0[k % cfg.dataset.tau0.size()];
      const Vec x0 = from_transverse(xp, tau0, plant.surfaces);
      Trajectory traj =
          integrate_sampled(plant.system, x0, input, 0.0,
                            times(times.size() - 1), 1e-10, times);
      if (cfg.dataset.snr_db)
        add_noise(traj, *cfg.dataset.snr_db,
                  cfg.seed + 101 + static_cast<std::uint64_t>(k));
      merge(build_dataset(traj, plant.surfaces, Vec()));
      append_rows(out.blackbox_inputs, blackbox_block(traj, Vec()));
      append_rows(out.blackbox_targets, traj.derivs);
      out.trajectories.push_back(std::move(traj));
      out.plant_of_traj.push_back(0);
    }
    return out;
  }

  // Kite: operating points round-robin, random phase and offset direction.
  if (cfg.system.vr.empty())
    throw Error(errc::config, "kite training needs system.vr operating points");
  for (double v : cfg.system.vr) out.plants.push_back(build_plant(cfg, v));

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < cfg.dataset.n_trajectories; ++k) {
    const int pi = k % static_cast<int>(out.plants.size());
    const PlantSetup& plant = out.plants[pi];
    const double T = plant.cycle.period;
    const double tau0 = unit(rng) * T;
    const double psi = unit(rng) * 2.0 * M_PI;
    Vec xp(2);
    xp << std::cos(psi), std::sin(psi);
    xp *= cfg.dataset.offset_norm;
    const Vec x0 = from_transverse(xp, tau0, plant.surfaces);
    const Vec times =
        linspace(0.0, cfg.dataset.duration_periods * T,
                 sample_count(cfg.dataset.duration_periods,
                              cfg.dataset.samples_per_period));
    Trajectory traj =
        integrate_sampled(plant.system, x0, InputFn(), 0.0,
                          times(times.size() - 1), 1e-10, times);
    if (cfg.dataset.snr_db)
      add_noise(traj, *cfg.dataset.snr_db,
                cfg.seed + 101 + static_cast<std::uint64_t>(k));
    Vec p(1);
    p << plant.reference->vr;
    TransverseDataset ds = build_dataset(traj, plant.surfaces, p);
    if (cfg.identification.feedback_as_input)
      inject_feedback_input(ds, *plant.lqr);
    merge(std::move(ds));
    append_rows(out.blackbox_inputs, blackbox_block(traj, p));
    append_rows(out.blackbox_targets, traj.derivs);
    out.trajectories.push_back(std::move(traj));
    out.plant_of_traj.push_back(pi);
  }
  return out;
}

IdentifyArtifacts run_identify(const ExperimentConfig& cfg) {
  IdentifyArtifacts out;
  out.data = build_training_data(cfg);

  IdentifyOptions opts;
  opts.search.budget = cfg.identification.budget;
  if (cfg.has_seed) opts.search.seed = cfg.seed;
  opts.lambda_init = cfg.identification.lambda_init;
  opts.length_scale_init = cfg.identification.length_scale_init;
  out.main = identify(out.data.dataset, cfg.identification.multivariate, opts);

  if (cfg.identification.med_vr) {
    const double target = *cfg.identification.med_vr;
    if (out.data.dataset.param_dim < 1)
      throw Error(errc::config,
                  "med_vr needs parameter-annotated training data");
    TransverseDataset sub;
    sub.state_dim = out.data.dataset.state_dim;
    sub.input_dim = out.data.dataset.input_dim;
    sub.param_dim = out.data.dataset.param_dim;
    sub.period = out.data.dataset.period;
    for (const TransverseSample& s : out.data.dataset.samples)
      if (std::abs(s.param(0) - target) <= 1e-9 * std::max(1.0, target))
        sub.samples.push_back(s);
    if (sub.samples.empty())
      throw Error(errc::config,
                  "med_vr matches none of the training operating points");
    IdentifyOptions mid = opts;
    mid.search.seed = opts.search.seed + 7777;
    out.med = identify(sub, false, mid);
  }

  if (cfg.identification.fit_blackbox) {
    HyperSearchOptions bs = opts.search;
    bs.seed = opts.search.seed + 31337;
    const int exo = out.data.plants.front().system.input_dim;
    out.blackbox = fit_blackbox(out.data.blackbox_inputs,
                                out.data.blackbox_targets, exo, bs);
  }
  return out;
}

std::pair<Mat, Vec> transverse_signals(const Trajectory& traj,
                                       const SurfaceFamily& sf) {
  const int n = traj.size();
  const double T = sf.period();
  Mat xperp(n, sf.perp_dim());
  Vec tau(n);
  double warm = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < n; ++i) {
    double guess = warm;
    if (i > 0) guess = warm + (traj.times(i) - traj.times(i - 1));
    const TransverseCoords tc =
        to_transverse(traj.states.row(i).transpose(), sf, guess);
    double unwrapped = tc.tau;
    if (i > 0) unwrapped = guess + std::remainder(tc.tau - guess, T);
    xperp.row(i) = tc.xperp.transpose();
    tau(i) = unwrapped;
    warm = unwrapped;
  }
  return {std::move(xperp), std::move(tau)};
}

namespace {

// Fold a per-phase feedback gain into an identified kite model so it can be
// rolled forward autonomously: d = -K(tau) xperp turns [A B; g h] into the
// closed-loop matrix [A - B K; g - h K] sampled on a phase grid.
LppvModel close_model_loop(const LppvModel& model, const PeriodicLqr& lqr,
                           double period, const Vec& p) {
  const int m = 512;
  std::vector<Mat> grid(m);
  for (int j = 0; j < m; ++j) {
    const double tau = period * static_cast<double>(j) / m;
    const Eigen::RowVectorXd k = lqr.gain(tau);
    Mat omega(model.state_dim(), model.perp_dim());
    omega.topRows(model.perp_dim()) =
        model.A(tau, p) - model.B(tau, p) * k;
    omega.bottomRows(1) = model.g(tau, p) - model.h(tau, p) * k;
    grid[j] = omega;
  }
  return LppvModel::from_grid(period, 0, grid);
}

}  // namespace

PredictArtifacts run_predict(const ExperimentConfig& cfg) {
  PredictArtifacts out;
  const bool kite = cfg.system.name == "kite";
  std::optional<double> vr;
  if (kite) {
    if (!(cfg.test.vr > 0.0))
      throw Error(errc::config, "kite prediction needs test.vr > 0");
    vr = cfg.test.vr;
  }
  out.plant = build_plant(cfg, vr);
  const SurfaceFamily& sf = out.plant.surfaces;
  const double T = out.plant.cycle.period;

  std::mt19937_64 rng(cfg.seed + 555);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.tau0 = cfg.test.tau0 ? *cfg.test.tau0 : unit(rng) * T;
  if (!cfg.test.initial_xperp.empty()) {
    if (static_cast<int>(cfg.test.initial_xperp.size()) != sf.perp_dim())
      throw Error(errc::config, "test.initial_xperp must have " +
                                    std::to_string(sf.perp_dim()) +
                                    " components");
    out.xperp0 = Eigen::Map<const Vec>(cfg.test.initial_xperp.data(),
                                       sf.perp_dim());
  } else if (cfg.test.offset_norm) {
    out.xperp0.resize(sf.perp_dim());
    if (sf.perp_dim() == 1) {
      out.xperp0(0) = (unit(rng) < 0.5 ? -1.0 : 1.0) * *cfg.test.offset_norm;
    } else if (sf.perp_dim() == 2) {
      const double psi = unit(rng) * 2.0 * M_PI;
      out.xperp0 << std::cos(psi), std::sin(psi);
      out.xperp0 *= *cfg.test.offset_norm;
    } else {
      throw Error(errc::config,
                  "random test offsets support 1 or 2 transverse dimensions");
    }
  } else {
    throw Error(errc::config,
                "test needs either initial_xperp or offset_norm");
  }

  const Vec times = linspace(0.0, cfg.test.duration_periods * T,
                             sample_count(cfg.test.duration_periods,
                                          cfg.test.samples_per_period));
  const InputFn input = kite ? InputFn() : make_forcing(cfg.test.forcing, T);
  const Vec x0 = from_transverse(out.xperp0, out.tau0, sf);
  out.truth = integrate_sampled(out.plant.system, x0, input, 0.0,
                                times(times.size() - 1), 1e-10, times);
  std::tie(out.truth_xperp, out.truth_tau) = transverse_signals(out.truth, sf);

  auto simulate_entry = [&](const std::string& name, const LppvModel& model,
                            const Vec& p) {
    const InputFn d = model.input_dim() > 0 ? input : InputFn();
    const TransverseTrajectory tt =
        simulate(model, out.xperp0, out.tau0, d, 0.0, times(times.size() - 1),
                 p, 1e-9, times);
    PredictionEntry entry;
    entry.name = name;
    entry.times = tt.times;
    entry.states = reconstruct(tt, sf);
    entry.has_transverse = true;
    entry.xperp = tt.xperp;
    entry.tau = tt.tau;
    out.entries.push_back(std::move(entry));
  };

  for (const ModelRef& ref : cfg.test.models) {
    const IdentifiedModel im = load_model_json(ref.path);
    LppvModel model = LppvModel::from_identified(im);
    if (std::abs(model.period() - T) > 1e-6 * T)
      throw Error(errc::config, "model '" + ref.name +
                                    "' was identified around a different "
                                    "cycle (period mismatch)");
    Vec p;
    if (im.param_dim() > 0) {
      p.resize(1);
      p << cfg.test.vr;
    }
    if (kite && model.input_dim() > 0) {
      // Feedback-as-input variant: fold the test gain back in.
      model = close_model_loop(model, *out.plant.lqr, T, p);
      p = Vec();
    }
    simulate_entry(ref.name, model, p);
  }

  if (cfg.test.include_analytic) {
    const LppvModel lin = linearization_model(out.plant.system, sf);
    simulate_entry("analytic", lin, Vec());
  }

  if (cfg.test.blackbox_path) {
    const BlackboxModel bb = load_blackbox_json(*cfg.test.blackbox_path);
    Vec p;
    if (bb.input_dim() >
        out.truth.state_dim() + bb.exogenous_dim()) {
      p.resize(bb.input_dim() - out.truth.state_dim() - bb.exogenous_dim());
      if (p.size() != 1)
        throw Error(errc::dimension_mismatch,
                    "blackbox model expects an unsupported parameter layout");
      p << cfg.test.vr;
    }
    Trajectory pred;
    if (kite && bb.exogenous_dim() == 1 && out.plant.lqr) {
      // Closed-loop composition: the baseline synthesises its feedback input
      // from the state it predicts, like the deployed controller would.
      auto sfp = std::make_shared<SurfaceFamily>(sf);
      auto lqrp = std::make_shared<PeriodicLqr>(*out.plant.lqr);
      auto bbp = std::make_shared<BlackboxModel>(bb);
      auto cache = std::make_shared<double>(out.tau0);
      const Vec pc = p;
      OdeSystem sys;
      sys.state_dim = out.truth.state_dim();
      sys.input_dim = 0;
      sys.rhs = [sfp, lqrp, bbp, cache, pc](const Vec& x, const Vec&,
                                            double) -> Vec {
        Vec d = Vec::Zero(1);
        try {
          const TransverseCoords tc = to_transverse(x, *sfp, *cache);
          *cache = tc.tau;
          d(0) = -lqrp->gain(tc.tau).dot(tc.xperp);
        } catch (const Error&) {
          // off-neighborhood state: keep integrating on feedforward only
        }
        Vec u(bbp->input_dim());
        u.head(x.size()) = x;
        u.segment(x.size(), 1) = d;
        if (pc.size() > 0) u.tail(pc.size()) = pc;
        return bbp->predict(u);
      };
      pred = integrate_sampled(sys, out.truth.states.row(0).transpose(),
                               InputFn(), 0.0, times(times.size() - 1), 1e-9,
                               times);
    } else {
      const InputFn d = bb.exogenous_dim() > 0 ? input : InputFn();
      pred =
          bb.predict_trajectory(out.truth.states.row(0).transpose(), d, p, 0.0,
                                times(times.size() - 1), 1e-9, times);
    }
    PredictionEntry entry;
    entry.name = "blackbox";
    entry.times = pred.times;
    entry.states = pred.states;
    out.entries.push_back(std::move(entry));
  }

  out.report = make_report(out.truth.times, out.truth.states, out.truth_xperp,
                           out.truth_tau, out.entries);
  return out;
}

CompareArtifacts run_compare(const ExperimentConfig& cfg) {
  const bool kite = cfg.system.name == "kite";
  std::optional<double> vr;
  if (kite) {
    if (!(cfg.compare.vr > 0.0))
      throw Error(errc::config, "kite comparison needs compare.vr > 0");
    vr = cfg.compare.vr;
  }
  const PlantSetup plant = build_plant(cfg, vr);
  const IdentifiedModel im = load_model_json(cfg.compare.model_path);
  const LppvModel model = LppvModel::from_identified(im);
  const double T = plant.cycle.period;
  if (std::abs(model.period() - T) > 1e-6 * T)
    throw Error(errc::config,
                "model was identified around a different cycle "
                "(period mismatch)");

  // Oracle with matching regressor layout: models carrying an input channel
  // are compared against the loop they saw as data (kite: command
  // perturbations around the feedforward), input-free models against the
  // autonomous closed loop.
  LppvModel oracle;
  if (kite && model.input_dim() > 0)
    oracle = *plant.openloop_linearization;
  else
    oracle = linearization_model(plant.system, plant.surfaces);
  if (model.state_dim() != oracle.state_dim() ||
      model.theta_dim() != oracle.theta_dim())
    throw Error(errc::config,
                "model and linearization dimensions do not match");

  Vec p;
  if (im.param_dim() > 0) {
    p.resize(1);
    p << cfg.compare.vr;
  }

  CompareArtifacts out;
  const int m = std::max(cfg.compare.grid_points, 8);
  out.tau_grid.resize(m);
  const int rows = model.state_dim();
  const int cols = model.theta_dim();
  Mat num2 = Mat::Zero(rows, cols);
  Mat den2 = Mat::Zero(rows, cols);
  out.model_omega.reserve(m);
  out.oracle_omega.reserve(m);
  for (int j = 0; j < m; ++j) {
    const double tau = T * static_cast<double>(j) / m;
    out.tau_grid(j) = tau;
    Mat mo = model.omega(tau, p);
    Mat oo = oracle.omega(tau);
    num2.array() += (mo - oo).array().square();
    den2.array() += oo.array().square();
    out.model_omega.push_back(std::move(mo));
    out.oracle_omega.push_back(std::move(oo));
  }
  out.rel_l2.resize(rows, cols);
  out.oracle_rms = (den2 / static_cast<double>(m)).array().sqrt();
  out.worst_significant = 0.0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (den2(i, j) > 0.0)
        out.rel_l2(i, j) = std::sqrt(num2(i, j) / den2(i, j));
      else
        out.rel_l2(i, j) =
            num2(i, j) > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
      if (out.oracle_rms(i, j) >= out.significance_floor)
        out.worst_significant =
            std::max(out.worst_significant, out.rel_l2(i, j));
    }
  }
  return out;
}

}  // namespace lppv
