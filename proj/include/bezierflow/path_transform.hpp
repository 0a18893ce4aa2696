#pragma once

#include <functional>

#include <Eigen/Dense>

#include "bezierflow/scheduler.hpp"

namespace bezierflow {

using State = Eigen::VectorXd;

/// Velocity field u(x, s) of an ODE in s.
using VelocityFn = std::function<State(const State&, double)>;

/// Everything the reparameterized velocity needs at one target time s.
struct TransformSample {
    double source_time;      // t_s
    double scale;            // c_s
    double dtime_ds;         // dt_s / ds
    double dlog_scale_ds;    // d log c_s / ds
};

/// Re-expresses a path under the `source` scheduler as a path under the
/// `target` scheduler, via xbar_s = c_s x_{t_s} with
///   t_s = rho^{-1}(rhobar(s)),   c_s = sigmabar(s)/sigma(t_s) = alphabar(s)/alpha(t_s)
/// and c_s = 1 at s in {0, 1}. The endpoints of both paths coincide.
class TransformContext {
public:
    TransformContext(Scheduler source, Scheduler target);

    const Scheduler& source() const { return source_; }
    const Scheduler& target() const { return target_; }

    double time_map(double s) const;
    double scale(double s) const;
    /// rhobar'(s) / rho'(t_s), finite at both endpoints.
    double time_map_derivative(double s) const;
    double scale_log_derivative(double s) const;

    /// All four quantities at once, sharing scheduler evaluations.
    TransformSample sample(double s) const;

    /// ubar_s(xbar) = (d log c_s / ds) xbar + c_s (dt_s/ds) u_{t_s}(xbar / c_s).
    State transformed_velocity(const VelocityFn& field, double s, const State& xbar) const;

    /// The transformed field as a callable of (xbar, s).
    VelocityFn transformed_field(VelocityFn field) const;

private:
    Scheduler source_;
    Scheduler target_;
};

}  // namespace bezierflow
