#pragma once

#include <cstddef>
#include <functional>

namespace bezierflow {

/// Environment variable holding the worker count for parallel loops.
inline constexpr const char* kWorkersEnv = "BEZIERFLOW_WORKERS";

/// Worker count from BEZIERFLOW_WORKERS, else the hardware concurrency (>= 1).
int worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index
/// runs exactly once; callers write results into per-index slots so the
/// outcome does not depend on scheduling. The first exception thrown by any
/// body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bezierflow
