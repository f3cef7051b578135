#include "lppv/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lppv/errors.hpp"

namespace lppv {

Mat interp_columns(const Vec& src_t, const Mat& values, const Vec& dst_t) {
  const int N = static_cast<int>(src_t.size());
  const int n = static_cast<int>(values.cols());
  if (values.rows() != N)
    throw Error(errc::dimension_mismatch, "grid/value length mismatch");
  if (N < 2) throw Error(errc::config, "need at least two samples");

  // Per-node slopes from centered differences (one-sided at the ends).
  Mat slope(N, n);
  slope.row(0) = (values.row(1) - values.row(0)) / (src_t(1) - src_t(0));
  slope.row(N - 1) =
      (values.row(N - 1) - values.row(N - 2)) / (src_t(N - 1) - src_t(N - 2));
  for (int i = 1; i + 1 < N; ++i)
    slope.row(i) =
        (values.row(i + 1) - values.row(i - 1)) / (src_t(i + 1) - src_t(i - 1));

  Mat out(dst_t.size(), n);
  int seg = 0;
  for (int k = 0; k < dst_t.size(); ++k) {
    const double t = std::clamp(dst_t(k), src_t(0), src_t(N - 1));
    while (seg + 2 < N && src_t(seg + 1) < t) ++seg;
    while (seg > 0 && src_t(seg) > t) --seg;
    const double h = src_t(seg + 1) - src_t(seg);
    const double s = (t - src_t(seg)) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    out.row(k) = h00 * values.row(seg) + h10 * h * slope.row(seg) +
                 h01 * values.row(seg + 1) + h11 * h * slope.row(seg + 1);
  }
  return out;
}

const ReportRow& PredictionReport::row(const std::string& name) const {
  for (const auto& r : rows)
    if (r.name == name) return r;
  throw Error(errc::config, "no report row named '" + name + "'");
}

std::string PredictionReport::table() const {
  std::ostringstream os;
  os << "model                          rmse_state   rmse_transverse\n";
  for (const auto& r : rows) {
    os << r.name;
    for (size_t i = r.name.size(); i < 31; ++i) os << ' ';
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-12.6g ", r.rmse_state);
    os << buf;
    if (r.has_transverse) {
      std::snprintf(buf, sizeof(buf), "%-12.6g", r.rmse_transverse);
      os << buf;
    } else {
      os << "-";
    }
    os << '\n';
  }
  return os.str();
}

PredictionReport make_report(const Vec& truth_times, const Mat& truth_states,
                             const Mat& truth_xperp, const Vec& truth_tau,
                             const std::vector<PredictionEntry>& entries) {
  PredictionReport report;
  const int N = static_cast<int>(truth_times.size());
  for (const auto& e : entries) {
    ReportRow row;
    row.name = e.name;
    row.has_transverse = e.has_transverse;

    const Mat states = interp_columns(e.times, e.states, truth_times);
    row.rmse_state =
        std::sqrt((states - truth_states).squaredNorm() /
                  (N * truth_states.cols()));

    if (e.has_transverse && truth_xperp.rows() == N) {
      Mat tv(e.times.size(), e.xperp.cols() + 1);
      tv.leftCols(e.xperp.cols()) = e.xperp;
      tv.col(e.xperp.cols()) = e.tau;
      const Mat aligned = interp_columns(e.times, tv, truth_times);
      double acc = 0.0;
      for (int i = 0; i < N; ++i) {
        acc += (aligned.row(i).head(truth_xperp.cols()).transpose() -
                truth_xperp.row(i).transpose())
                   .squaredNorm();
        const double dtau = aligned(i, truth_xperp.cols()) - truth_tau(i);
        acc += dtau * dtau;
      }
      row.rmse_transverse =
          std::sqrt(acc / (N * (truth_xperp.cols() + 1)));
    } else {
      row.rmse_transverse = std::numeric_limits<double>::quiet_NaN();
      row.has_transverse = false;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace lppv
