#pragma once

#include <string>
#include <vector>

#include "lppv/core.hpp"

namespace lppv {

// One model's forward prediction, ready for comparison against the truth.
// `states` are full states on `times`; models living in transverse
// coordinates also carry their (xperp, unwrapped tau) signals.
struct PredictionEntry {
  std::string name;
  Vec times;
  Mat states;
  bool has_transverse = false;
  Mat xperp;
  Vec tau;
};

struct ReportRow {
  std::string name;
  double rmse_state = 0.0;
  double rmse_transverse = 0.0;  // NaN when no transverse signals exist
  bool has_transverse = false;
};

struct PredictionReport {
  std::vector<ReportRow> rows;
  const ReportRow& row(const std::string& name) const;
  std::string table() const;  // fixed-width text table for logs
};

// Cubic interpolation (Hermite with centered-difference slopes) of each
// column of `values` from grid `src_t` onto `dst_t`.
Mat interp_columns(const Vec& src_t, const Mat& values, const Vec& dst_t);

// Time-aligned root-mean-square errors of each prediction against the
// truth.  Predictions are resampled onto the truth grid.  The transverse
// error concatenates the offset components with the phase error.
PredictionReport make_report(const Vec& truth_times, const Mat& truth_states,
                             const Mat& truth_xperp, const Vec& truth_tau,
                             const std::vector<PredictionEntry>& entries);

}  // namespace lppv
