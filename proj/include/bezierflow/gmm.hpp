#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bezierflow/path_transform.hpp"
#include "bezierflow/scheduler.hpp"

namespace bezierflow {

/// Isotropic Gaussian mixture: component k is N(means[k], variances[k] I).
class GmmSpec {
public:
    /// Throws std::invalid_argument when weights are not positive or do not
    /// sum to 1 (within 1e-12), variances are not positive, or dimensions
    /// disagree.
    GmmSpec(std::vector<double> weights, std::vector<State> means, std::vector<double> variances);

    /// Equal-weight ring of `modes` components at `radius` in 2-D, each with
    /// standard deviation `stddev`.
    static GmmSpec ring(int modes, double radius, double stddev);

    int dim() const { return static_cast<int>(means_.front().size()); }
    int components() const { return static_cast<int>(weights_.size()); }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<State>& means() const { return means_; }
    const std::vector<double>& variances() const { return variances_; }

    State mean() const;

private:
    std::vector<double> weights_;
    std::vector<State> means_;
    std::vector<double> variances_;
};

/// Exact interpolant velocity for a standard-normal source and a GMM target
/// along scheduler `sched`:
///   u_s(x) = alpha' E[x1 | x_s = x] + sigma' E[x0 | x_s = x].
/// Per component, E[x0 | x, k] = sigma (x - alpha mu_k) / (alpha^2 g_k + sigma^2),
/// which stays finite at s = 1, so the field is defined on all of [0,1].
class VelocityField {
public:
    VelocityField(GmmSpec gmm, Scheduler sched);

    const GmmSpec& gmm() const { return gmm_; }
    const Scheduler& scheduler() const { return sched_; }

    std::vector<double> responsibilities(const State& x, double s) const;
    State posterior_target_mean(const State& x, double s) const;
    State posterior_source_mean(const State& x, double s) const;
    State velocity(const State& x, double s) const;

    VelocityFn as_function() const;

private:
    struct Posterior {
        State target_mean;
        State source_mean;
    };
    Posterior posterior(const State& x, const ScheduleSample& v, std::vector<double>* resp) const;

    GmmSpec gmm_;
    Scheduler sched_;
};

using Rng = std::mt19937_64;

/// Draws from the mixture. Deterministic in `seed`.
std::vector<State> sample_target(const GmmSpec& gmm, int count, std::uint64_t seed);
/// Draws from N(0, I_dim). Deterministic in `seed`.
std::vector<State> sample_source(int dim, int count, std::uint64_t seed);

}  // namespace bezierflow
