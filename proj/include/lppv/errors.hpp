#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lppv {

// All failures surfaced by the toolkit carry a short machine-readable
// category next to the human-readable message, so callers (and the CLI)
// can react to the class of failure without parsing prose.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

// Category strings used across the library.  Kept in one place so tests can
// assert on them without magic literals.
namespace errc {
inline constexpr const char* config = "config";
inline constexpr const char* io = "io";
inline constexpr const char* dimension_mismatch = "dimension-mismatch";
inline constexpr const char* stiffness = "stiffness";
inline constexpr const char* singular_latitude = "singular-latitude";
inline constexpr const char* not_a_limit_cycle = "not-a-limit-cycle";
inline constexpr const char* convergence = "convergence";
inline constexpr const char* degenerate_flow = "degenerate-flow";
inline constexpr const char* degenerate_center = "degenerate-center";
inline constexpr const char* non_transversal_surface = "non-transversal-surface";
inline constexpr const char* frame_discontinuity = "frame-discontinuity";
inline constexpr const char* out_of_neighborhood = "out-of-neighborhood";
inline constexpr const char* well_posedness = "well-posedness";
inline constexpr const char* dataset_degenerate = "dataset-degenerate";
inline constexpr const char* numerical = "numerical";
inline constexpr const char* oracle_unreliable = "oracle-unreliable";
inline constexpr const char* riccati_divergence = "riccati-divergence";
inline constexpr const char* no_closed_orbit = "no-closed-orbit";
}  // namespace errc

}  // namespace lppv
