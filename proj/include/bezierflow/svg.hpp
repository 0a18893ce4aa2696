#pragma once

#include <span>
#include <string>
#include <vector>

#include "bezierflow/bezier.hpp"
#include "bezierflow/ode.hpp"
#include "bezierflow/scheduler.hpp"

namespace bezierflow {

/// Overlays every trajectory file (one color per file, endpoints dotted).
/// Output is a byte-deterministic function of the input; coordinates are
/// written with three decimals.
std::string render_trajectories_svg(std::span<const TrajectoryFile> files);

/// alphabar and sigmabar on [0,1] with their control points marked at i/n.
std::string render_scheduler_svg(const Scheduler& sched);

/// Four degree-8 control arrangements used for the shape gallery.
std::vector<ControlVector> gallery_control_vectors();

/// One panel per gallery curve.
std::string render_gallery_svg();

}  // namespace bezierflow
