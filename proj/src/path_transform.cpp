#include "bezierflow/path_transform.hpp"

#include <atomic>
#include <iostream>
#include <stdexcept>

namespace bezierflow {

namespace {

constexpr double kTinyScale = 1e-6;

void warn_tiny_scale(double c, double s) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true)) {
        std::clog << "warning: path transform scale c_s=" << c << " at s=" << s
                  << " is below " << kTinyScale << "\n";
    }
}

}  // namespace

TransformContext::TransformContext(Scheduler source, Scheduler target)
    : source_(std::move(source)), target_(std::move(target)) {}

double TransformContext::time_map(double s) const {
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("time_map: s outside [0,1]");
    if (s == 0.0) return 0.0;
    if (s == 1.0) return 1.0;
    return source_.invert_snr(target_.snr(s));
}

TransformSample TransformContext::sample(double s) const {
    const ScheduleSample tgt = target_.eval(s);
    double t = s;
    if (s > 0.0 && s < 1.0) t = source_.invert_snr(tgt.alpha / tgt.sigma);
    const ScheduleSample src = source_.eval(t);

    // c_s from whichever quotient is better conditioned: sigma form while the
    // noise coefficient dominates, alpha form once the signal does.
    const bool use_alpha = tgt.alpha >= tgt.sigma;
    double c = 1.0;
    if (s > 0.0 && s < 1.0) c = use_alpha ? tgt.alpha / src.alpha : tgt.sigma / src.sigma;

    // rhobar'(s)/rho'(t) = (W_target / W_source) (sigma(t)/sigmabar(s))^2 with
    // W = alpha' sigma - alpha sigma'; the squared ratio is 1/c^2.
    const double w_target = tgt.dalpha * tgt.sigma - tgt.alpha * tgt.dsigma;
    const double w_source = src.dalpha * src.sigma - src.alpha * src.dsigma;
    const double dt = w_target / w_source / (c * c);

    const double dlog_c = use_alpha ? tgt.dalpha / tgt.alpha - src.dalpha / src.alpha * dt
                                    : tgt.dsigma / tgt.sigma - src.dsigma / src.sigma * dt;
    if (c < kTinyScale) warn_tiny_scale(c, s);
    return {t, c, dt, dlog_c};
}

double TransformContext::scale(double s) const { return sample(s).scale; }

double TransformContext::time_map_derivative(double s) const { return sample(s).dtime_ds; }

double TransformContext::scale_log_derivative(double s) const { return sample(s).dlog_scale_ds; }

State TransformContext::transformed_velocity(const VelocityFn& field, double s, const State& xbar) const {
    const TransformSample ts = sample(s);
    State out = field(xbar / ts.scale, ts.source_time);
    out *= ts.scale * ts.dtime_ds;
    out += ts.dlog_scale_ds * xbar;
    return out;
}

VelocityFn TransformContext::transformed_field(VelocityFn field) const {
    return [ctx = *this, field = std::move(field)](const State& xbar, double s) {
        return ctx.transformed_velocity(field, s, xbar);
    };
}

}  // namespace bezierflow
