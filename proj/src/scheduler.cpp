#include "bezierflow/scheduler.hpp"

#include "detail/casteljau.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace bezierflow {

std::string_view to_string(SchedulerKind kind) {
    switch (kind) {
        case SchedulerKind::linear: return "linear";
        case SchedulerKind::vp: return "vp";
        case SchedulerKind::bezier: return "bezier";
    }
    return "unknown";
}

SchedulerKind scheduler_kind_from_string(std::string_view name) {
    if (name == "linear") return SchedulerKind::linear;
    if (name == "vp") return SchedulerKind::vp;
    if (name == "bezier") return SchedulerKind::bezier;
    throw std::invalid_argument("unknown scheduler kind '" + std::string(name) + "'");
}

Scheduler Scheduler::linear() { return Scheduler(SchedulerKind::linear); }

Scheduler Scheduler::vp() { return Scheduler(SchedulerKind::vp); }

Scheduler Scheduler::bezier(const LogitVector& alpha_logits, const LogitVector& sigma_logits) {
    if (alpha_logits.size() != sigma_logits.size()) {
        throw std::invalid_argument("bezier scheduler: alpha and sigma logits differ in length");
    }
    Scheduler out = bezier_from_points(monotone_points_from_logits(alpha_logits),
                                       monotone_points_from_logits(sigma_logits));
    // Suffix sums of the softmax are more accurate than 1 - prefix sums.
    const auto sl = sigma_logits.values();
    double top = sl[0];
    for (double v : sl) top = std::max(top, v);
    std::vector<double> weights(sl.size());
    double total = 0.0;
    for (std::size_t j = 0; j < sl.size(); ++j) {
        weights[j] = std::exp(sl[j] - top);
        total += weights[j];
    }
    auto& comp = out.curves_->sigma_complement;
    double suffix = 0.0;
    for (std::size_t i = sl.size(); i-- > 1;) {
        suffix += weights[i] / total;
        comp[i] = std::min(suffix, 1.0);
    }
    out.alpha_logits_ = alpha_logits;
    out.sigma_logits_ = sigma_logits;
    return out;
}

Scheduler Scheduler::bezier_from_points(ControlVector alpha_points, ControlVector sigma_points) {
    if (alpha_points.degree() != sigma_points.degree()) {
        throw std::invalid_argument("bezier scheduler: alpha and sigma degrees differ");
    }
    std::vector<double> comp(sigma_points.points().size());
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = 1.0 - sigma_points.points()[i];
    Scheduler out(SchedulerKind::bezier);
    out.curves_ = Curves{std::move(alpha_points), std::move(sigma_points), std::move(comp)};
    return out;
}

Scheduler Scheduler::bezier_linear_init(int degree) {
    return bezier(LogitVector::uniform(degree), LogitVector::uniform(degree));
}

int Scheduler::degree() const {
    switch (kind_) {
        case SchedulerKind::linear: return 1;
        case SchedulerKind::vp: return 0;
        case SchedulerKind::bezier: return curves_->alpha.degree();
    }
    return 0;
}

ScheduleSample Scheduler::eval(double s) const {
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("scheduler: s outside [0,1]");
    switch (kind_) {
        case SchedulerKind::linear:
            return {s, 1.0 - s, 1.0, -1.0};
        case SchedulerKind::vp: {
            constexpr double half_pi = std::numbers::pi / 2.0;
            if (s == 0.0) return {0.0, 1.0, half_pi, 0.0};
            if (s == 1.0) return {1.0, 0.0, 0.0, -half_pi};
            return {std::sin(half_pi * s), std::cos(half_pi * s), half_pi * std::cos(half_pi * s),
                    -half_pi * std::sin(half_pi * s)};
        }
        case SchedulerKind::bezier: {
            const auto& c = *curves_;
            const double da = bezier_derivative(c.alpha, s);
            const double ds = -bezier_derivative(c.sigma, s);
            if (s == 0.0) return {0.0, 1.0, da, ds};
            if (s == 1.0) return {1.0, 0.0, da, ds};
            return {detail::de_casteljau(c.alpha.points(), s), detail::de_casteljau(c.sigma_complement, s), da, ds};
        }
    }
    throw std::logic_error("scheduler: bad kind");
}

double Scheduler::snr(double s) const {
    if (s == 1.0) return std::numeric_limits<double>::infinity();
    const auto v = eval(s);
    return v.alpha / v.sigma;
}

double Scheduler::snr_derivative(double s) const {
    if (s == 1.0) return std::numeric_limits<double>::infinity();
    const auto v = eval(s);
    return (v.dalpha * v.sigma - v.alpha * v.dsigma) / (v.sigma * v.sigma);
}

double Scheduler::invert_snr(double y) const {
    if (!std::isfinite(y) || y < 0.0) throw SnrRangeError("invert_snr: ratio outside [rho(0), inf)");
    if (y == 0.0) return 0.0;
    constexpr double below_one = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    switch (kind_) {
        case SchedulerKind::linear:
            return std::min(y / (1.0 + y), below_one);
        case SchedulerKind::vp:
            return std::min(std::atan(y) / (std::numbers::pi / 2.0), below_one);
        case SchedulerKind::bezier:
            break;
    }

    // Bracket: start from the clamp 1 - 1e-3 and move towards 1 geometrically
    // if the ratio lies beyond it.
    double lo = 0.0;
    double hi = 1.0 - kSnrGridClamp;
    while (snr(hi) < y) {
        lo = hi;
        const double gap = (1.0 - hi) / 16.0;
        if (gap < std::numeric_limits<double>::epsilon()) return below_one;
        hi = 1.0 - gap;
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (snr(mid) < y ? lo : hi) = mid;
    }
    // Safeguarded Newton polish: bisection alone leaves a large relative
    // error when s is very close to 0 or 1.
    double s = 0.5 * (lo + hi);
    for (int iter = 0; iter < 60; ++iter) {
        const double r = snr(s) - y;
        if (std::abs(r) <= 1e-15 * std::max(1.0, y)) break;
        (r < 0.0 ? lo : hi) = s;
        const double d = snr_derivative(s);
        double next = s - r / d;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == s) break;
        s = next;
    }
    return s;
}

std::string_view to_string(GridKind kind) {
    return kind == GridKind::uniform_time ? "uniform_time" : "uniform_snr";
}

GridKind grid_kind_from_string(std::string_view name) {
    if (name == "uniform_time") return GridKind::uniform_time;
    if (name == "uniform_snr") return GridKind::uniform_snr;
    throw std::invalid_argument("unknown grid kind '" + std::string(name) + "'");
}

TimeGrid::TimeGrid(std::vector<double> times, GridKind kind) : times_(std::move(times)), kind_(kind) {
    if (times_.size() < 2 || times_.front() != 0.0 || times_.back() != 1.0) {
        throw std::invalid_argument("TimeGrid: needs at least two times from exactly 0 to exactly 1");
    }
    for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
        if (!(times_[i] < times_[i + 1])) {
            throw std::invalid_argument("TimeGrid: times must be strictly increasing");
        }
    }
}

TimeGrid make_grid(GridKind kind, int steps, const Scheduler& sched) {
    if (steps < 1) throw std::domain_error("make_grid: need at least one step");
    std::vector<double> times(static_cast<std::size_t>(steps) + 1);
    times.front() = 0.0;
    times.back() = 1.0;
    if (kind == GridKind::uniform_time) {
        for (int i = 1; i < steps; ++i) times[static_cast<std::size_t>(i)] = static_cast<double>(i) / steps;
    } else {
        const double lo = std::log(sched.snr(kSnrGridClamp));
        const double hi = std::log(sched.snr(1.0 - kSnrGridClamp));
        for (int i = 1; i < steps; ++i) {
            const double log_snr = lo + (hi - lo) * static_cast<double>(i) / steps;
            times[static_cast<std::size_t>(i)] = sched.invert_snr(std::exp(log_snr));
        }
    }
    return TimeGrid(std::move(times), kind);
}

}  // namespace bezierflow
