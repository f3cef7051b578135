#include "lppv/serialize.hpp"

#include <fstream>

#include <json.hpp>

#include "lppv/errors.hpp"

namespace lppv {

namespace {

using Json = nlohmann::ordered_json;

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const Mat& m) {
  Json a = Json::array();
  for (int i = 0; i < m.rows(); ++i)
    a.push_back(to_json(Vec(m.row(i).transpose())));
  return a;
}

Vec vec_from(const Json& a) {
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v(static_cast<int>(i)) = a[i];
  return v;
}

Mat mat_from(const Json& a) {
  if (a.empty()) return Mat(0, 0);
  const int rows = static_cast<int>(a.size());
  const int cols = static_cast<int>(a[0].size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(a[i].size()) != cols)
      throw Error(errc::io, "ragged matrix in model file");
    for (int j = 0; j < cols; ++j) m(i, j) = a[i][j];
  }
  return m;
}

void dump_to(const std::string& path, const Json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(errc::io, "cannot open '" + path + "' for writing");
  os << j.dump(2) << '\n';
}

Json parse_file(const std::string& path, const char* expected_format) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(errc::io, "cannot open '" + path + "' for reading");
  Json j;
  try {
    j = Json::parse(is);
  } catch (const std::exception& e) {
    throw Error(errc::io, "malformed JSON in '" + path + "': " + e.what());
  }
  if (j.value("format", "") != expected_format)
    throw Error(errc::io, "'" + path + "' is not a " +
                              std::string(expected_format) + " file");
  if (j.value("schema_version", 0) != 1)
    throw Error(errc::io, "unsupported schema version in '" + path + "'");
  return j;
}

Json kernel_to_json(const KernelSpec& k) {
  Json j;
  j["kind"] = kernel_kind_name(k.kind);
  if (k.kind != KernelKind::se) j["period"] = k.period;
  j["length_scale_tau"] = k.length_scale_tau;
  if (k.uses_param()) j["length_scale_p"] = to_json(k.length_scale_p);
  return j;
}

KernelSpec kernel_from_json(const Json& j) {
  KernelSpec k;
  k.kind = kernel_kind_from_name(j.at("kind"));
  k.period = j.value("period", 0.0);
  k.length_scale_tau = j.at("length_scale_tau");
  if (k.uses_param()) k.length_scale_p = vec_from(j.at("length_scale_p"));
  return k;
}

}  // namespace

void save_model_json(const std::string& path, const IdentifiedModel& model) {
  Json j;
  j["format"] = "lppv-model";
  j["schema_version"] = 1;
  j["period"] = model.period();
  j["state_dim"] = model.state_dim();
  j["input_dim"] = model.input_dim();
  j["param_dim"] = model.param_dim();
  Json rows = Json::array();
  for (const auto& r : model.rows()) {
    Json row;
    row["lambda"] = r.config.lambda;
    Json kernels = Json::array();
    for (const auto& k : r.config.element_kernels)
      kernels.push_back(kernel_to_json(k));
    row["kernels"] = kernels;
    row["alpha"] = to_json(r.alpha);
    rows.push_back(row);
  }
  j["rows"] = rows;
  Json train;
  train["theta"] = to_json(model.train().theta);
  train["tau"] = to_json(model.train().tau);
  train["param"] = to_json(model.train().param);
  j["training"] = train;
  dump_to(path, j);
}

IdentifiedModel load_model_json(const std::string& path) {
  Json j = parse_file(path, "lppv-model");
  const int n = j.at("state_dim");
  const int nd = j.at("input_dim");
  const int np = j.at("param_dim");
  const double period = j.at("period");

  RegressionData train;
  train.theta = mat_from(j.at("training").at("theta"));
  train.tau = vec_from(j.at("training").at("tau"));
  train.param = mat_from(j.at("training").at("param"));
  if (train.param.rows() == 0)
    train.param = Mat(train.tau.size(), 0);

  std::vector<IdentifiedRow> rows;
  for (const auto& rj : j.at("rows")) {
    IdentifiedRow r;
    r.config.lambda = rj.at("lambda");
    for (const auto& kj : rj.at("kernels"))
      r.config.element_kernels.push_back(kernel_from_json(kj));
    r.alpha = vec_from(rj.at("alpha"));
    rows.push_back(std::move(r));
  }
  return IdentifiedModel(std::move(rows), std::move(train), n, nd, np, period);
}

void save_blackbox_json(const std::string& path, const BlackboxModel& model) {
  Json j;
  j["format"] = "blackbox-model";
  j["schema_version"] = 1;
  j["exogenous_dim"] = model.exogenous_dim();
  j["inputs"] = to_json(model.inputs());
  Json channels = Json::array();
  for (const auto& c : model.channels()) {
    Json cj;
    cj["length_scales"] = to_json(c.length_scales);
    cj["lambda"] = c.lambda;
    cj["alpha"] = to_json(c.alpha);
    channels.push_back(cj);
  }
  j["channels"] = channels;
  dump_to(path, j);
}

BlackboxModel load_blackbox_json(const std::string& path) {
  Json j = parse_file(path, "blackbox-model");
  Mat inputs = mat_from(j.at("inputs"));
  std::vector<BlackboxModel::Channel> channels;
  for (const auto& cj : j.at("channels")) {
    BlackboxModel::Channel c;
    c.length_scales = vec_from(cj.at("length_scales"));
    c.lambda = cj.at("lambda");
    c.alpha = vec_from(cj.at("alpha"));
    channels.push_back(std::move(c));
  }
  return BlackboxModel(std::move(inputs), std::move(channels),
                       j.at("exogenous_dim"));
}

void save_cycle_json(const std::string& path, const LimitCycle& cycle) {
  Json j;
  j["format"] = "limit-cycle";
  j["schema_version"] = 1;
  j["period"] = cycle.period;
  j["param"] = to_json(cycle.param);
  j["tau"] = to_json(cycle.tau_grid);
  j["states"] = to_json(cycle.states);
  j["velocities"] = to_json(cycle.nominal_velocities);
  dump_to(path, j);
}

LimitCycle load_cycle_json(const std::string& path) {
  Json j = parse_file(path, "limit-cycle");
  LimitCycle lc;
  lc.period = j.at("period");
  lc.param = vec_from(j.at("param"));
  lc.tau_grid = vec_from(j.at("tau"));
  lc.states = mat_from(j.at("states"));
  lc.nominal_velocities = mat_from(j.at("velocities"));
  if (lc.states.rows() != lc.tau_grid.size() ||
      lc.nominal_velocities.rows() != lc.tau_grid.size())
    throw Error(errc::io, "inconsistent cycle file '" + path + "'");
  return lc;
}

}  // namespace lppv
