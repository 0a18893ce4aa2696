#pragma once

#include <span>

#include "bezierflow/path_transform.hpp"

namespace bezierflow {

/// Energy distance between two point clouds, V-statistic form:
///   2 E|X - Y| - E|X - X'| - E|Y - Y'|
/// with all pairs (diagonals included) averaged. Always >= 0.
double energy_distance(std::span<const State> xs, std::span<const State> ys);

/// Mean over i of |a_i - b_i|^2. Inputs must have equal length.
double mean_squared_error(std::span<const State> a, std::span<const State> b);

}  // namespace bezierflow
