#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bezierflow/path_transform.hpp"
#include "bezierflow/scheduler.hpp"

namespace bezierflow {

enum class FixedMethod { rk1, rk2 };

std::string_view to_string(FixedMethod method);
FixedMethod fixed_method_from_string(std::string_view name);

/// Field evaluations per step: 1 for Euler, 2 for explicit midpoint.
int evals_per_step(FixedMethod method);

/// Ordered (time, state) records of one solve plus its evaluation count.
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    int nfe = 0;

    const State& endpoint() const { return states.back(); }
};

/// Explicit fixed-step solve over `grid`.
///   rk1: x + h f(x, s)
///   rk2: x + h f(x + h/2 f(x, s), s + h/2)
/// `time_offsets`, when non-empty, holds one shift per step that is added
/// (then clamped to [0,1]) to every time handed to the field within that
/// step; the integration grid itself is unchanged.
Trajectory integrate_fixed(const VelocityFn& field, const State& x0, const TimeGrid& grid,
                           FixedMethod method, std::span<const double> time_offsets = {});

struct AdaptiveOptions {
    double rtol = 1e-6;
    double atol = 1e-8;
    /// Keep every accepted step in the result's trajectory.
    bool record = false;
    int max_steps = 100000;
};

struct AdaptiveResult {
    State endpoint;
    int nfe = 0;
    int accepted = 0;
    int rejected = 0;
    std::optional<Trajectory> trajectory;
};

/// Thrown when the adaptive step size collapses below 1e-12.
struct StiffnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dormand-Prince 5(4) with FSAL and PI step-size control, from s0 to s1.
AdaptiveResult integrate_adaptive(const VelocityFn& field, const State& x0, double s0, double s1,
                                  const AdaptiveOptions& opts = {});

/// Few-step solve of the transformed ODE along the target scheduler of
/// `ctx`; grid times are target-path times.
Trajectory solve_student(const TransformContext& ctx, const VelocityFn& source_field, const State& x0,
                         const TimeGrid& grid, FixedMethod method,
                         std::span<const double> time_offsets = {});

/// CSV export: "# label=<label>" and "# nfe=<n>" comment lines, a header
/// "id,time,x0,...,x{D-1}", then one row per node.
void write_trajectories_csv(std::ostream& out, std::span<const Trajectory> trajectories,
                            std::string_view label);

struct TrajectoryFile {
    std::string label;
    int nfe = 0;
    std::vector<Trajectory> trajectories;
};

/// Parses the format above. Throws std::runtime_error naming the 1-based
/// line number of the first malformed row.
TrajectoryFile read_trajectories_csv(std::istream& in);

}  // namespace bezierflow
