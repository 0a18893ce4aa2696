#include "bezierflow/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace bezierflow {

namespace {

double mean_pair_distance(std::span<const State> xs, std::span<const State> ys) {
    double total = 0.0;
    for (const auto& x : xs) {
        for (const auto& y : ys) total += (x - y).norm();
    }
    return total / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
}

}  // namespace

double energy_distance(std::span<const State> xs, std::span<const State> ys) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("energy_distance: empty sample");
    const double cross = mean_pair_distance(xs, ys);
    const double within_x = mean_pair_distance(xs, xs);
    const double within_y = mean_pair_distance(ys, ys);
    // Nonnegative in exact arithmetic; clamp rounding noise.
    return std::max(0.0, 2.0 * cross - within_x - within_y);
}

double mean_squared_error(std::span<const State> a, std::span<const State> b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("mean_squared_error: size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) total += (a[i] - b[i]).squaredNorm();
    return total / static_cast<double>(a.size());
}

}  // namespace bezierflow
