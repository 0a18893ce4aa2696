#pragma once

#include <algorithm>
#include <span>
#include <vector>

namespace bezierflow::detail {

// In-place de Casteljau on a scratch copy. Degrees here are small, so a
// stack buffer covers the common case.
inline double de_casteljau(std::span<const double> coeffs, double lambda) {
    constexpr std::size_t kStack = 64;
    double stack[kStack];
    std::vector<double> heap;
    double* work = stack;
    if (coeffs.size() > kStack) {
        heap.assign(coeffs.begin(), coeffs.end());
        work = heap.data();
    } else {
        std::copy(coeffs.begin(), coeffs.end(), stack);
    }
    const double mu = 1.0 - lambda;
    for (std::size_t level = coeffs.size() - 1; level > 0; --level) {
        for (std::size_t i = 0; i < level; ++i) work[i] = mu * work[i] + lambda * work[i + 1];
    }
    return work[0];
}

}  // namespace bezierflow::detail
