#include "bezierflow/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bezierflow {

GmmSpec::GmmSpec(std::vector<double> weights, std::vector<State> means, std::vector<double> variances)
    : weights_(std::move(weights)), means_(std::move(means)), variances_(std::move(variances)) {
    if (weights_.empty()) throw std::invalid_argument("gmm: no components");
    if (means_.size() != weights_.size() || variances_.size() != weights_.size()) {
        throw std::invalid_argument("gmm: weights, means and variances differ in length");
    }
    double total = 0.0;
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("gmm: weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("gmm: weights must sum to 1");
    for (double v : variances_) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("gmm: variances must be positive");
    }
    const auto d = means_.front().size();
    if (d == 0) throw std::invalid_argument("gmm: zero-dimensional means");
    for (const auto& m : means_) {
        if (m.size() != d) throw std::invalid_argument("gmm: inconsistent mean dimensions");
        if (!m.allFinite()) throw std::invalid_argument("gmm: non-finite mean");
    }
}

GmmSpec GmmSpec::ring(int modes, double radius, double stddev) {
    if (modes < 1) throw std::invalid_argument("gmm ring: need at least one mode");
    std::vector<double> weights(static_cast<std::size_t>(modes), 1.0 / modes);
    // Equal weights summing to exactly one regardless of rounding.
    double rest = 1.0;
    for (int k = 0; k + 1 < modes; ++k) rest -= weights[static_cast<std::size_t>(k)];
    weights.back() = rest;
    std::vector<State> means;
    for (int k = 0; k < modes; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / modes;
        State m(2);
        m << radius * std::cos(angle), radius * std::sin(angle);
        means.push_back(m);
    }
    return GmmSpec(std::move(weights), std::move(means),
                   std::vector<double>(static_cast<std::size_t>(modes), stddev * stddev));
}

State GmmSpec::mean() const {
    State out = State::Zero(dim());
    for (std::size_t k = 0; k < weights_.size(); ++k) out += weights_[k] * means_[k];
    return out;
}

VelocityField::VelocityField(GmmSpec gmm, Scheduler sched) : gmm_(std::move(gmm)), sched_(std::move(sched)) {}

VelocityField::Posterior VelocityField::posterior(const State& x, const ScheduleSample& v,
                                                  std::vector<double>* resp) const {
    const int k_count = gmm_.components();
    const double dim = gmm_.dim();
    const double a = v.alpha;
    const double sg = v.sigma;

    // Log-sum-exp over component marginals N(x; a mu_k, (a^2 g_k + s^2) I).
    std::vector<double> logw(static_cast<std::size_t>(k_count));
    double top = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < k_count; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const double var = a * a * gmm_.variances()[ku] + sg * sg;
        const double dist2 = (x - a * gmm_.means()[ku]).squaredNorm();
        logw[ku] = std::log(gmm_.weights()[ku]) - 0.5 * dim * std::log(var) - 0.5 * dist2 / var;
        top = std::max(top, logw[ku]);
    }
    double total = 0.0;
    for (double& lw : logw) {
        lw = std::exp(lw - top);
        total += lw;
    }

    Posterior out{State::Zero(x.size()), State::Zero(x.size())};
    for (int k = 0; k < k_count; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const double r = logw[ku] / total;
        logw[ku] = r;
        const double g = gmm_.variances()[ku];
        const double var = a * a * g + sg * sg;
        const State centered = x - a * gmm_.means()[ku];
        out.target_mean += r * (gmm_.means()[ku] + (a * g / var) * centered);
        out.source_mean += r * (sg / var) * centered;
    }
    if (resp) *resp = std::move(logw);
    return out;
}

std::vector<double> VelocityField::responsibilities(const State& x, double s) const {
    std::vector<double> resp;
    posterior(x, sched_.eval(s), &resp);
    return resp;
}

State VelocityField::posterior_target_mean(const State& x, double s) const {
    return posterior(x, sched_.eval(s), nullptr).target_mean;
}

State VelocityField::posterior_source_mean(const State& x, double s) const {
    return posterior(x, sched_.eval(s), nullptr).source_mean;
}

State VelocityField::velocity(const State& x, double s) const {
    const ScheduleSample v = sched_.eval(s);
    const Posterior p = posterior(x, v, nullptr);
    return v.dalpha * p.target_mean + v.dsigma * p.source_mean;
}

VelocityFn VelocityField::as_function() const {
    return [field = *this](const State& x, double s) { return field.velocity(x, s); };
}

std::vector<State> sample_target(const GmmSpec& gmm, int count, std::uint64_t seed) {
    if (count < 1) throw std::domain_error("sample_target: count must be >= 1");
    Rng rng(seed);
    std::discrete_distribution<int> pick(gmm.weights().begin(), gmm.weights().end());
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<State> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(pick(rng));
        const double sd = std::sqrt(gmm.variances()[k]);
        State x(gmm.dim());
        for (int d = 0; d < gmm.dim(); ++d) x[d] = gmm.means()[k][d] + sd * normal(rng);
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<State> sample_source(int dim, int count, std::uint64_t seed) {
    if (count < 1) throw std::domain_error("sample_source: count must be >= 1");
    if (dim < 1) throw std::domain_error("sample_source: dim must be >= 1");
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<State> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        State x(dim);
        for (int d = 0; d < dim; ++d) x[d] = normal(rng);
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace bezierflow
