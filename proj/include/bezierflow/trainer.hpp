#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bezierflow/gmm.hpp"
#include "bezierflow/ode.hpp"
#include "bezierflow/scheduler.hpp"

namespace bezierflow {

enum class OptimizerKind { rmsprop, sgd };

std::string_view to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(std::string_view name);

struct TrainConfig {
    /// Function evaluations per student sample; rk2 needs an even count.
    int nfe = 3;
    FixedMethod method = FixedMethod::rk1;
    GridKind grid = GridKind::uniform_time;
    int degree = 32;
    int train_count = 200;
    int val_count = 200;
    int epochs = 8;
    int batch_size = 25;
    double lr = 5e-3;
    OptimizerKind optimizer = OptimizerKind::rmsprop;
    double momentum = 0.9;
    double rmsprop_alpha = 0.99;
    double rmsprop_eps = 1e-8;
    double fd_step = 1e-5;
    double clip_norm = 1.0;
    std::uint64_t seed = 42;
    bool enable_decoupled = false;
    /// SGD rate for the decoupled offsets, applied as lr_decoupled / nfe.
    double lr_decoupled = 0.1;
    AdaptiveOptions teacher{};

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    /// Solver steps M implied by nfe and method.
    int steps() const;
};

/// One teacher-forcing example: a source draw and its teacher endpoint.
struct DistillationPair {
    State x0;
    State x1;
};

/// Teacher endpoints from adaptive solves of the source-path oracle ODE.
/// Throws std::domain_error for count < 1.
std::vector<DistillationPair> build_pairs(const GmmSpec& gmm, const Scheduler& source, int count,
                                          std::uint64_t seed, const AdaptiveOptions& teacher = {});

/// Trainable quantities: Bezier logits for both curves and optional
/// per-step time offsets (empty when decoupling is off).
struct SchedulerParams {
    std::vector<double> alpha;
    std::vector<double> sigma;
    std::vector<double> offsets;

    /// Equal logits (the linear scheduler) and zero offsets.
    static SchedulerParams linear_init(int degree, int offset_count = 0);

    Scheduler scheduler() const;
    std::vector<double> flatten() const;
    /// Inverse of flatten() using this instance's block sizes.
    SchedulerParams with_values(std::span<const double> flat) const;
    std::size_t size() const { return alpha.size() + sigma.size() + offsets.size(); }
};

/// Student-vs-teacher endpoint objective for a fixed source model.
class DistillationObjective {
public:
    DistillationObjective(GmmSpec gmm, Scheduler source, TimeGrid grid, FixedMethod method);

    const TimeGrid& grid() const { return grid_; }
    const Scheduler& source() const { return source_; }
    const VelocityField& field() const { return field_; }

    /// Student endpoint for one x0 under the given target scheduler.
    State student_endpoint(const Scheduler& target, const State& x0, std::span<const double> offsets = {}) const;
    Trajectory student_trajectory(const Scheduler& target, const State& x0,
                                  std::span<const double> offsets = {}) const;

    /// Squared L2 distance per pair.
    std::vector<double> pair_losses(const SchedulerParams& params, std::span<const DistillationPair> pairs) const;
    /// Mean squared L2 distance over pairs.
    double loss(const SchedulerParams& params, std::span<const DistillationPair> pairs) const;

private:
    GmmSpec gmm_;
    Scheduler source_;
    TimeGrid grid_;
    FixedMethod method_;
    VelocityField field_;
    VelocityFn source_fn_;
};

struct GradientError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Central differences with per-coordinate step fd_step * max(1, |theta_i|).
/// Coordinates are evaluated in parallel. Throws GradientError when any
/// probe returns a non-finite value.
std::vector<double> finite_difference_gradient(const std::function<double(std::span<const double>)>& f,
                                               std::span<const double> theta, double fd_step);

/// Rescales `grad` in place to global norm `max_norm` if it exceeds it.
/// Returns the norm before clipping.
double clip_global_norm(std::span<double> grad, double max_norm);

/// PyTorch-style RMSprop with momentum and zero weight decay.
class RmsProp {
public:
    RmsProp(std::size_t size, double lr, double alpha, double eps, double momentum);
    void step(std::span<double> params, std::span<const double> grad);

private:
    double lr_, alpha_, eps_, momentum_;
    std::vector<double> square_avg_;
    std::vector<double> buffer_;
};

struct TrainingDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunReport {
    /// Entry 0 is the initialization, entry e the state after epoch e.
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    int selected_epoch = 0;
    /// Best-validation checkpoint.
    SchedulerParams best;
    double wall_time_seconds = 0.0;
};

/// Teacher-forcing optimization of the Bezier logits (and optional
/// offsets). Checkpoint selection keeps the epoch with the lowest
/// validation loss, the initialization included. Throws TrainingDiverged
/// when a loss exceeds 1e6.
RunReport train(const TrainConfig& cfg, const GmmSpec& gmm, const Scheduler& source);

/// Same, with caller-supplied pairs and starting point.
RunReport train(const TrainConfig& cfg, const DistillationObjective& objective,
                std::span<const DistillationPair> train_pairs, std::span<const DistillationPair> val_pairs,
                SchedulerParams init);

struct TimestepFit {
    LogitVector alpha_logits;
    LogitVector sigma_logits;
    /// Target-path nodes s_k = k / M.
    std::vector<double> nodes;
    /// max_k max(|alphabar(s_k) - alpha(t_k)|, |sigmabar(s_k) - sigma(t_k)|)
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;

    Scheduler scheduler() const { return Scheduler::bezier(alpha_logits, sigma_logits); }
};

/// Finds Bezier logits of the given degree whose scheduler, at uniform
/// nodes s_k = k/M, reproduces the source coefficients at `timesteps` t_k.
/// Runs damped Gauss-Newton on the logits of each curve. Failure to reach
/// `tol` within `max_iterations` is reported via `converged`, not thrown.
TimestepFit fit_scheduler_to_timesteps(const Scheduler& source, std::span<const double> timesteps, int degree,
                                       double tol = 1e-6, int max_iterations = 500);

}  // namespace bezierflow
