#include "bezierflow/bezier.hpp"

#include "detail/casteljau.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bezierflow {

ControlVector::ControlVector(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) {
        throw std::invalid_argument("ControlVector: need at least two points (degree >= 1)");
    }
    if (points_.front() != 0.0 || points_.back() != 1.0) {
        throw std::invalid_argument("ControlVector: endpoints must be exactly 0 and 1");
    }
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        if (!(points_[i] <= points_[i + 1])) {
            throw std::invalid_argument("ControlVector: points must be nondecreasing (index " +
                                        std::to_string(i) + ")");
        }
    }
}

ControlVector ControlVector::unchecked(std::vector<double> points) {
    return ControlVector(std::move(points), NoCheck{});
}

LogitVector::LogitVector(std::vector<double> logits) : logits_(std::move(logits)) {
    if (logits_.empty()) {
        throw std::domain_error("LogitVector: need at least one logit");
    }
    for (double v : logits_) {
        if (!std::isfinite(v)) throw std::domain_error("LogitVector: non-finite logit");
    }
}

LogitVector LogitVector::uniform(int n) {
    return LogitVector(std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

double bernstein(int i, int n, double lambda) {
    if (n < 0 || i < 0 || i > n) throw std::domain_error("bernstein: index out of range");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::domain_error("bernstein: lambda outside [0,1]");
    double binom = 1.0;
    for (int k = 1; k <= i; ++k) binom = binom * (n - i + k) / k;
    return binom * std::pow(1.0 - lambda, n - i) * std::pow(lambda, i);
}

namespace {

void check_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::domain_error("bezier: lambda outside [0,1]");
}

}  // namespace

double bezier_eval(const ControlVector& c, double lambda) {
    check_lambda(lambda);
    if (lambda == 0.0) return c[0];
    if (lambda == 1.0) return c[c.degree()];
    return detail::de_casteljau(c.points(), lambda);
}

double bezier_derivative(const ControlVector& c, double lambda) {
    check_lambda(lambda);
    const int n = c.degree();
    auto pts = c.points();
    std::vector<double> diffs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) diffs[static_cast<std::size_t>(i)] = pts[i + 1] - pts[i];
    if (lambda == 0.0) return n * diffs.front();
    if (lambda == 1.0) return n * diffs.back();
    return n * detail::de_casteljau(diffs, lambda);
}

namespace {

std::vector<double> softmax(std::span<const double> logits) {
    const double top = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double total = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
        out[j] = std::exp(logits[j] - top);
        total += out[j];
    }
    for (double& v : out) v /= total;
    return out;
}

}  // namespace

ControlVector monotone_points_from_logits(const LogitVector& logits) {
    const auto phi = softmax(logits.values());
    const std::size_t n = phi.size();
    std::vector<double> points(n + 1);
    points[0] = 0.0;
    double partial = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        partial += phi[i - 1];
        points[i] = std::min(partial, 1.0);
    }
    points[n] = 1.0;
    return ControlVector(std::move(points));
}

std::vector<double> monotone_points_jacobian(const LogitVector& logits) {
    const auto phi = softmax(logits.values());
    const std::size_t n = phi.size();
    std::vector<double> jac((n - 1) * n, 0.0);
    double psi = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        psi += phi[i - 1];
        for (std::size_t k = 0; k < n; ++k) {
            const double inside = k < i ? phi[k] : 0.0;
            jac[(i - 1) * n + k] = inside - psi * phi[k];
        }
    }
    return jac;
}

}  // namespace bezierflow
