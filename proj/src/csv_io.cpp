#include "lppv/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lppv/errors.hpp"

namespace lppv {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);  // binary: keep '\n' endings
  if (!os) throw Error(errc::io, "cannot open '" + path + "' for writing");
  return os;
}

void write_row(std::ofstream& os, const std::vector<double>& vals) {
  for (size_t i = 0; i < vals.size(); ++i) {
    if (i) os << ',';
    os << format_double(vals[i]);
  }
  os << '\n';
}

std::vector<std::vector<double>> read_table(const std::string& path,
                                            std::vector<std::string>* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(errc::io, "cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(is, line))
    throw Error(errc::io, "empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (header) {
    header->clear();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header->push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str())
        throw Error(errc::io, "malformed number in '" + path + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  auto os = open_out(path);
  const int n = traj.state_dim(), nd = traj.input_dim();
  os << 't';
  for (int j = 0; j < n; ++j) os << ",x" << j + 1;
  for (int j = 0; j < n; ++j) os << ",dx" << j + 1;
  for (int j = 0; j < nd; ++j) os << ",d" << j + 1;
  os << '\n';
  for (int i = 0; i < traj.size(); ++i) {
    std::vector<double> row;
    row.push_back(traj.times(i));
    for (int j = 0; j < n; ++j) row.push_back(traj.states(i, j));
    for (int j = 0; j < n; ++j) row.push_back(traj.derivs(i, j));
    for (int j = 0; j < nd; ++j) row.push_back(traj.inputs(i, j));
    write_row(os, row);
  }
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::vector<std::string> header;
  auto rows = read_table(path, &header);
  if (header.empty() || header[0] != "t")
    throw Error(errc::io, "'" + path + "' is not a trajectory file");
  int n = 0, nd = 0;
  for (const auto& h : header) {
    if (h.rfind("x", 0) == 0 && h.rfind("xperp", 0) != 0) ++n;
    if (h.rfind("d", 0) == 0 && h.rfind("dx", 0) != 0) ++nd;
  }
  if (n == 0 || static_cast<int>(header.size()) != 1 + 2 * n + nd)
    throw Error(errc::io, "unexpected trajectory columns in '" + path + "'");
  const int N = static_cast<int>(rows.size());
  Trajectory tr;
  tr.times.resize(N);
  tr.states.resize(N, n);
  tr.derivs.resize(N, n);
  tr.inputs.resize(N, nd);
  for (int i = 0; i < N; ++i) {
    if (static_cast<int>(rows[i].size()) != 1 + 2 * n + nd)
      throw Error(errc::io, "ragged row in '" + path + "'");
    tr.times(i) = rows[i][0];
    for (int j = 0; j < n; ++j) tr.states(i, j) = rows[i][1 + j];
    for (int j = 0; j < n; ++j) tr.derivs(i, j) = rows[i][1 + n + j];
    for (int j = 0; j < nd; ++j) tr.inputs(i, j) = rows[i][1 + 2 * n + j];
  }
  return tr;
}

void write_cycle_csv(const std::string& path, const LimitCycle& cycle) {
  auto os = open_out(path);
  const int n = cycle.state_dim();
  os << "tau";
  for (int j = 0; j < n; ++j) os << ",x" << j + 1;
  for (int j = 0; j < n; ++j) os << ",v" << j + 1;
  os << '\n';
  for (int m = 0; m < cycle.grid_size(); ++m) {
    std::vector<double> row;
    row.push_back(cycle.tau_grid(m));
    for (int j = 0; j < n; ++j) row.push_back(cycle.states(m, j));
    for (int j = 0; j < n; ++j) row.push_back(cycle.nominal_velocities(m, j));
    write_row(os, row);
  }
}

void write_surface_csv(const std::string& path, const SurfaceFamily& sf) {
  auto os = open_out(path);
  const int n = sf.state_dim();
  os << "tau";
  for (int j = 0; j < n; ++j) os << ",xstar_" << j + 1;
  for (int j = 0; j < n; ++j) os << ",z_" << j + 1;
  os << ",margin\n";
  const auto& cyc = sf.cycle();
  for (int m = 0; m < sf.grid_size(); ++m) {
    std::vector<double> row;
    row.push_back(cyc.tau_grid(m));
    for (int j = 0; j < n; ++j) row.push_back(cyc.states(m, j));
    for (int j = 0; j < n; ++j) row.push_back(sf.normal_grid()(m, j));
    row.push_back(
        sf.normal_grid().row(m).dot(cyc.nominal_velocities.row(m)));
    write_row(os, row);
  }
}

void write_dataset_csv(const std::string& path, const TransverseDataset& ds) {
  auto os = open_out(path);
  const int np = ds.perp_dim();
  os << "t,tau";
  for (int j = 0; j < np; ++j) os << ",xperp_" << j + 1;
  for (int j = 0; j < ds.input_dim; ++j) os << ",d_" << j + 1;
  for (int j = 0; j < np; ++j) os << ",dxperp_" << j + 1;
  os << ",tau_dot";
  for (int j = 0; j < ds.param_dim; ++j) os << ",p_" << j + 1;
  os << '\n';
  for (const auto& s : ds.samples) {
    std::vector<double> row;
    row.push_back(s.t);
    row.push_back(s.tau);
    for (int j = 0; j < np; ++j) row.push_back(s.xperp(j));
    for (int j = 0; j < ds.input_dim; ++j) row.push_back(s.input(j));
    for (int j = 0; j < np; ++j) row.push_back(s.xperp_dot(j));
    row.push_back(s.tau_dot);
    for (int j = 0; j < ds.param_dim; ++j) row.push_back(s.param(j));
    write_row(os, row);
  }
}

void write_prediction_csv(const std::string& path, const Vec& times,
                          const Mat& truth_states, const Mat& pred_states,
                          const Mat& pred_xperp, const Vec& pred_tau) {
  auto os = open_out(path);
  const int n = static_cast<int>(truth_states.cols());
  const bool transverse = pred_xperp.rows() == times.size();
  os << 't';
  for (int j = 0; j < n; ++j) os << ",x_true_" << j + 1;
  for (int j = 0; j < n; ++j) os << ",x_pred_" << j + 1;
  if (transverse) {
    for (int j = 0; j < pred_xperp.cols(); ++j) os << ",xperp_pred_" << j + 1;
    os << ",tau_pred";
  }
  os << '\n';
  for (int i = 0; i < times.size(); ++i) {
    std::vector<double> row;
    row.push_back(times(i));
    for (int j = 0; j < n; ++j) row.push_back(truth_states(i, j));
    for (int j = 0; j < n; ++j) row.push_back(pred_states(i, j));
    if (transverse) {
      for (int j = 0; j < pred_xperp.cols(); ++j)
        row.push_back(pred_xperp(i, j));
      row.push_back(pred_tau(i));
    }
    write_row(os, row);
  }
}

void write_gain_csv(const std::string& path, const PeriodicLqr& lqr,
                    double period) {
  auto os = open_out(path);
  const int np = static_cast<int>(lqr.gain_grid.cols());
  const int M = static_cast<int>(lqr.gain_grid.rows());
  os << "tau";
  for (int j = 0; j < np; ++j) os << ",K" << j + 1;
  os << '\n';
  for (int m = 0; m < M; ++m) {
    std::vector<double> row;
    row.push_back(period * m / M);
    for (int j = 0; j < np; ++j) row.push_back(lqr.gain_grid(m, j));
    write_row(os, row);
  }
}

void write_reference_csv(const std::string& path, const KiteReference& ref,
                         const LimitCycle& cycle) {
  auto os = open_out(path);
  os << "tau,gamma_star,u_star,theta_star,phi_star\n";
  for (int m = 0; m < cycle.grid_size(); ++m) {
    const double tau = cycle.tau_grid(m);
    write_row(os, {tau, ref.gamma(tau), ref.u(tau), cycle.states(m, 0),
                   cycle.states(m, 1)});
  }
}

void write_compare_csv(const std::string& path, const Vec& tau_grid,
                       const std::vector<Mat>& model_omega,
                       const std::vector<Mat>& oracle_omega) {
  auto os = open_out(path);
  const int n = static_cast<int>(model_omega[0].rows());
  const int nt = static_cast<int>(model_omega[0].cols());
  os << "tau";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < nt; ++j)
      os << ",model_" << i + 1 << '_' << j + 1 << ",oracle_" << i + 1 << '_'
         << j + 1;
  os << '\n';
  for (int m = 0; m < tau_grid.size(); ++m) {
    std::vector<double> row;
    row.push_back(tau_grid(m));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < nt; ++j) {
        row.push_back(model_omega[m](i, j));
        row.push_back(oracle_omega[m](i, j));
      }
    write_row(os, row);
  }
}

}  // namespace lppv
