#pragma once

#include <string>

#include "lppv/blackbox.hpp"
#include "lppv/limit_cycle.hpp"
#include "lppv/regression.hpp"

namespace lppv {

// JSON persistence for identified models, baseline models and cycles.
// Doubles are written in shortest round-trip form, so save -> load -> save
// reproduces files byte-for-byte.

void save_model_json(const std::string& path, const IdentifiedModel& model);
IdentifiedModel load_model_json(const std::string& path);

void save_blackbox_json(const std::string& path, const BlackboxModel& model);
BlackboxModel load_blackbox_json(const std::string& path);

void save_cycle_json(const std::string& path, const LimitCycle& cycle);
LimitCycle load_cycle_json(const std::string& path);

}  // namespace lppv
