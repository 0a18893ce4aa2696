#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace bezierflow {

/// Ordered Bezier control values in [0,1] with endpoints pinned to 0 and 1.
class ControlVector {
public:
    /// Throws std::invalid_argument unless the points are nondecreasing,
    /// start at exactly 0, end at exactly 1 and describe degree >= 1.
    explicit ControlVector(std::vector<double> points);

    /// Bypasses validation. Only the verification suite uses this, to
    /// check that broken control points are caught downstream.
    static ControlVector unchecked(std::vector<double> points);

    int degree() const { return static_cast<int>(points_.size()) - 1; }
    std::span<const double> points() const { return points_; }
    double operator[](int i) const { return points_[static_cast<std::size_t>(i)]; }

    friend bool operator==(const ControlVector&, const ControlVector&) = default;

private:
    struct NoCheck {};
    ControlVector(std::vector<double> points, NoCheck) : points_(std::move(points)) {}

    std::vector<double> points_;
};

/// Unconstrained logits feeding the cumulative softmax.
class LogitVector {
public:
    /// Throws std::domain_error on empty input or non-finite entries.
    explicit LogitVector(std::vector<double> logits);

    /// n equal logits: maps to uniformly spaced control points.
    static LogitVector uniform(int n);

    int size() const { return static_cast<int>(logits_.size()); }
    std::span<const double> values() const { return logits_; }
    double operator[](int i) const { return logits_[static_cast<std::size_t>(i)]; }

    friend bool operator==(const LogitVector&, const LogitVector&) = default;

private:
    std::vector<double> logits_;
};

/// C(n,i) (1-lambda)^(n-i) lambda^i. Throws std::domain_error when i is not
/// in [0,n] or lambda is not in [0,1].
double bernstein(int i, int n, double lambda);

/// Curve value via de Casteljau recursion.
double bezier_eval(const ControlVector& c, double lambda);

/// n * sum_i b_{i,n-1}(lambda) (C_{i+1} - C_i), evaluated by de Casteljau on
/// the forward differences.
double bezier_derivative(const ControlVector& c, double lambda);

/// n logits -> n+1 control points [0, psi_1, ..., psi_{n-1}, 1] where psi_i
/// is the i-th partial sum of softmax(logits). Every interior point lies in
/// (0,1) and the sequence is nondecreasing.
ControlVector monotone_points_from_logits(const LogitVector& logits);

/// Jacobian of the interior points with respect to the logits, row-major
/// (n-1) x n: entry (i-1, j) = d psi_i / d theta_j.
std::vector<double> monotone_points_jacobian(const LogitVector& logits);

}  // namespace bezierflow
