#pragma once

#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "bezierflow/scheduler.hpp"

namespace bezierflow {

/// Invalid or invariant-violating scheduler document.
struct SchedulerFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// {"kind", "degree", "logits_alpha", "logits_sigma"} plus, for Bezier
/// schedulers, the derived "control_points_alpha" / "control_points_sigma".
nlohmann::json scheduler_to_json(const Scheduler& sched);

/// Rebuilds a scheduler. Control points, when present, must be monotone with
/// pinned endpoints and must agree with the logits to 1e-9.
Scheduler scheduler_from_json(const nlohmann::json& doc);

void save_scheduler(const Scheduler& sched, const std::filesystem::path& path);
Scheduler load_scheduler(const std::filesystem::path& path);

}  // namespace bezierflow
