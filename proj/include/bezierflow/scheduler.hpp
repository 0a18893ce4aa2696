#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "bezierflow/bezier.hpp"

namespace bezierflow {

enum class SchedulerKind { linear, vp, bezier };

std::string_view to_string(SchedulerKind kind);
SchedulerKind scheduler_kind_from_string(std::string_view name);

/// Interpolation coefficients and their time derivatives at one instant.
struct ScheduleSample {
    double alpha;
    double sigma;
    double dalpha;
    double dsigma;
};

/// Raised by snr inversion when the requested ratio is not attainable.
struct SnrRangeError : std::range_error {
    using std::range_error::range_error;
};

/// A one-sided interpolant scheduler (alpha, sigma) on s in [0,1] with
/// alpha(0)=sigma(1)=0 and alpha(1)=sigma(0)=1.
///
/// The Bezier kind parameterizes alpha(s) = B_alpha(s) and
/// sigma(s) = 1 - B_sigma(s), with both control vectors monotone, so the
/// signal-to-noise ratio alpha/sigma is strictly increasing on [0,1).
/// Instances are immutable and cheap to copy.
class Scheduler {
public:
    static Scheduler linear();
    /// alpha = sin(pi s / 2), sigma = cos(pi s / 2).
    static Scheduler vp();
    static Scheduler bezier(const LogitVector& alpha_logits, const LogitVector& sigma_logits);
    /// Bezier scheduler straight from control points (no logits attached).
    static Scheduler bezier_from_points(ControlVector alpha_points, ControlVector sigma_points);
    /// Bezier scheduler that reproduces the linear one: n equal logits per curve.
    static Scheduler bezier_linear_init(int degree);

    SchedulerKind kind() const { return kind_; }
    /// Bezier degree; 1 for linear and 0 for vp.
    int degree() const;

    const ControlVector* alpha_points() const { return curves_ ? &curves_->alpha : nullptr; }
    const ControlVector* sigma_points() const { return curves_ ? &curves_->sigma : nullptr; }
    const std::optional<LogitVector>& alpha_logits() const { return alpha_logits_; }
    const std::optional<LogitVector>& sigma_logits() const { return sigma_logits_; }

    /// Throws std::domain_error for s outside [0,1]. Boundary values are exact.
    ScheduleSample eval(double s) const;

    /// rho(s) = alpha/sigma. Returns +infinity at s = 1.
    double snr(double s) const;
    /// d rho / ds on [0,1); +infinity at s = 1.
    double snr_derivative(double s) const;
    /// Solves snr(s) = y for s in [0,1). Throws SnrRangeError when y is
    /// negative or non-finite.
    double invert_snr(double y) const;

private:
    struct Curves {
        ControlVector alpha;
        ControlVector sigma;
        // 1 - sigma control points, kept separately for accuracy near s = 1.
        std::vector<double> sigma_complement;
    };

    Scheduler(SchedulerKind kind) : kind_(kind) {}

    SchedulerKind kind_;
    std::optional<Curves> curves_;
    std::optional<LogitVector> alpha_logits_;
    std::optional<LogitVector> sigma_logits_;
};

enum class GridKind { uniform_time, uniform_snr };

std::string_view to_string(GridKind kind);
GridKind grid_kind_from_string(std::string_view name);

/// Strictly increasing times from exactly 0 to exactly 1.
class TimeGrid {
public:
    /// Throws std::invalid_argument unless strictly increasing with pinned endpoints.
    TimeGrid(std::vector<double> times, GridKind kind);

    int steps() const { return static_cast<int>(times_.size()) - 1; }
    const std::vector<double>& times() const { return times_; }
    GridKind kind() const { return kind_; }

private:
    std::vector<double> times_;
    GridKind kind_;
};

/// Clamp used by uniform_snr grids: log-SNR is equispaced over
/// [log rho(eps), log rho(1 - eps)].
inline constexpr double kSnrGridClamp = 1e-3;

/// M-step grid. uniform_time gives i/M; uniform_snr equispaces log-SNR of
/// `sched` over the clamped range, endpoints pinned. Throws
/// std::domain_error for M < 1.
TimeGrid make_grid(GridKind kind, int steps, const Scheduler& sched);

}  // namespace bezierflow
