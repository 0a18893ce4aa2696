#include "bezierflow/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "bezierflow/parallel.hpp"

namespace bezierflow {

std::string_view to_string(OptimizerKind kind) { return kind == OptimizerKind::rmsprop ? "rmsprop" : "sgd"; }

OptimizerKind optimizer_kind_from_string(std::string_view name) {
    if (name == "rmsprop") return OptimizerKind::rmsprop;
    if (name == "sgd") return OptimizerKind::sgd;
    throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("train.") + field + ": " + what);
    };
    require(nfe >= 1, "nfe", "must be >= 1");
    require(method != FixedMethod::rk2 || nfe % 2 == 0, "nfe", "rk2 needs an even number of evaluations");
    require(degree >= 1, "degree", "must be >= 1");
    require(train_count >= 1, "train_count", "must be >= 1");
    require(val_count >= 1, "val_count", "must be >= 1");
    require(epochs >= 0, "epochs", "must be >= 0");
    require(batch_size >= 1, "batch_size", "must be >= 1");
    require(lr >= 0.0 && std::isfinite(lr), "lr", "must be finite and >= 0");
    require(momentum >= 0.0 && momentum < 1.0, "momentum", "must be in [0,1)");
    require(rmsprop_alpha > 0.0 && rmsprop_alpha < 1.0, "rmsprop_alpha", "must be in (0,1)");
    require(fd_step > 0.0 && fd_step <= 1e-2, "fd_step", "must be in (0, 1e-2]");
    require(clip_norm > 0.0, "clip_norm", "must be > 0");
    require(lr_decoupled >= 0.0, "lr_decoupled", "must be >= 0");
    require(teacher.rtol > 0.0 && teacher.atol >= 0.0, "teacher", "tolerances must be positive");
}

int TrainConfig::steps() const { return method == FixedMethod::rk1 ? nfe : nfe / 2; }

std::vector<DistillationPair> build_pairs(const GmmSpec& gmm, const Scheduler& source, int count,
                                          std::uint64_t seed, const AdaptiveOptions& teacher) {
    if (count < 1) throw std::domain_error("build_pairs: count must be >= 1");
    const auto x0s = sample_source(gmm.dim(), count, seed);
    const VelocityFn field = VelocityField(gmm, source).as_function();
    AdaptiveOptions opts = teacher;
    opts.record = false;
    std::vector<DistillationPair> pairs(x0s.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
        pairs[i] = {x0s[i], integrate_adaptive(field, x0s[i], 0.0, 1.0, opts).endpoint};
    });
    return pairs;
}

SchedulerParams SchedulerParams::linear_init(int degree, int offset_count) {
    return {std::vector<double>(static_cast<std::size_t>(degree), 1.0),
            std::vector<double>(static_cast<std::size_t>(degree), 1.0),
            std::vector<double>(static_cast<std::size_t>(offset_count), 0.0)};
}

Scheduler SchedulerParams::scheduler() const { return Scheduler::bezier(LogitVector(alpha), LogitVector(sigma)); }

std::vector<double> SchedulerParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(size());
    flat.insert(flat.end(), alpha.begin(), alpha.end());
    flat.insert(flat.end(), sigma.begin(), sigma.end());
    flat.insert(flat.end(), offsets.begin(), offsets.end());
    return flat;
}

SchedulerParams SchedulerParams::with_values(std::span<const double> flat) const {
    if (flat.size() != size()) throw std::invalid_argument("SchedulerParams: flat size mismatch");
    SchedulerParams out;
    auto it = flat.begin();
    out.alpha.assign(it, it + static_cast<std::ptrdiff_t>(alpha.size()));
    it += static_cast<std::ptrdiff_t>(alpha.size());
    out.sigma.assign(it, it + static_cast<std::ptrdiff_t>(sigma.size()));
    it += static_cast<std::ptrdiff_t>(sigma.size());
    out.offsets.assign(it, flat.end());
    return out;
}

DistillationObjective::DistillationObjective(GmmSpec gmm, Scheduler source, TimeGrid grid, FixedMethod method)
    : gmm_(gmm),
      source_(source),
      grid_(std::move(grid)),
      method_(method),
      field_(std::move(gmm), std::move(source)),
      source_fn_(field_.as_function()) {}

Trajectory DistillationObjective::student_trajectory(const Scheduler& target, const State& x0,
                                                     std::span<const double> offsets) const {
    const TransformContext ctx(source_, target);
    return solve_student(ctx, source_fn_, x0, grid_, method_, offsets);
}

State DistillationObjective::student_endpoint(const Scheduler& target, const State& x0,
                                              std::span<const double> offsets) const {
    return student_trajectory(target, x0, offsets).endpoint();
}

std::vector<double> DistillationObjective::pair_losses(const SchedulerParams& params,
                                                       std::span<const DistillationPair> pairs) const {
    const Scheduler target = params.scheduler();
    std::vector<double> out(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        out[i] = (student_endpoint(target, pairs[i].x0, params.offsets) - pairs[i].x1).squaredNorm();
    }
    return out;
}

double DistillationObjective::loss(const SchedulerParams& params, std::span<const DistillationPair> pairs) const {
    if (pairs.empty()) throw std::invalid_argument("loss: no pairs");
    const auto losses = pair_losses(params, pairs);
    return std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size());
}

std::vector<double> finite_difference_gradient(const std::function<double(std::span<const double>)>& f,
                                               std::span<const double> theta, double fd_step) {
    if (!(fd_step > 0.0)) throw std::invalid_argument("finite_difference_gradient: fd_step must be > 0");
    std::vector<double> grad(theta.size());
    parallel_for(theta.size(), [&](std::size_t i) {
        std::vector<double> probe(theta.begin(), theta.end());
        const double h = fd_step * std::max(1.0, std::abs(theta[i]));
        probe[i] = theta[i] + h;
        const double up = f(probe);
        probe[i] = theta[i] - h;
        const double down = f(probe);
        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw GradientError("finite_difference_gradient: non-finite loss at coordinate " + std::to_string(i));
        }
        grad[i] = (up - down) / (2.0 * h);
    });
    return grad;
}

double clip_global_norm(std::span<double> grad, double max_norm) {
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const double factor = max_norm / norm;
        for (double& g : grad) g *= factor;
    }
    return norm;
}

RmsProp::RmsProp(std::size_t size, double lr, double alpha, double eps, double momentum)
    : lr_(lr), alpha_(alpha), eps_(eps), momentum_(momentum), square_avg_(size, 0.0), buffer_(size, 0.0) {}

void RmsProp::step(std::span<double> params, std::span<const double> grad) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        square_avg_[i] = alpha_ * square_avg_[i] + (1.0 - alpha_) * grad[i] * grad[i];
        const double denom = std::sqrt(square_avg_[i]) + eps_;
        if (momentum_ > 0.0) {
            buffer_[i] = momentum_ * buffer_[i] + grad[i] / denom;
            params[i] -= lr_ * buffer_[i];
        } else {
            params[i] -= lr_ * grad[i] / denom;
        }
    }
}

namespace {

constexpr double kDivergenceThreshold = 1e6;

void check_divergence(double loss, const char* where, int epoch) {
    if (!std::isfinite(loss) || loss > kDivergenceThreshold) {
        throw TrainingDiverged(std::string("training diverged: ") + where + " loss " + std::to_string(loss) +
                               " at epoch " + std::to_string(epoch));
    }
}

}  // namespace

RunReport train(const TrainConfig& cfg, const DistillationObjective& objective,
                std::span<const DistillationPair> train_pairs, std::span<const DistillationPair> val_pairs,
                SchedulerParams init) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    RunReport report;
    SchedulerParams params = std::move(init);
    report.best = params;
    report.train_loss.push_back(objective.loss(params, train_pairs));
    report.val_loss.push_back(objective.loss(params, val_pairs));
    check_divergence(report.train_loss.back(), "train", 0);

    const std::size_t logit_count = params.alpha.size() + params.sigma.size();
    RmsProp rmsprop(logit_count, cfg.lr, cfg.rmsprop_alpha, cfg.rmsprop_eps, cfg.momentum);
    const double offset_lr = cfg.lr_decoupled / cfg.nfe;

    std::vector<std::size_t> order(train_pairs.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(cfg.seed ^ 0x5DEECE66DULL);
    std::vector<DistillationPair> batch;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
            batch.clear();
            for (std::size_t i = begin; i < end; ++i) batch.push_back(train_pairs[order[i]]);

            const auto batch_loss = [&](std::span<const double> flat) {
                return objective.loss(params.with_values(flat), batch);
            };
            std::vector<double> flat = params.flatten();
            std::vector<double> grad = finite_difference_gradient(batch_loss, flat, cfg.fd_step);
            clip_global_norm(grad, cfg.clip_norm);

            const std::span<double> logits(flat.data(), logit_count);
            const std::span<const double> logit_grad(grad.data(), logit_count);
            if (cfg.optimizer == OptimizerKind::rmsprop) {
                rmsprop.step(logits, logit_grad);
            } else {
                for (std::size_t i = 0; i < logit_count; ++i) logits[i] -= cfg.lr * logit_grad[i];
            }
            for (std::size_t i = logit_count; i < flat.size(); ++i) flat[i] -= offset_lr * grad[i];
            params = params.with_values(flat);
        }

        report.train_loss.push_back(objective.loss(params, train_pairs));
        report.val_loss.push_back(objective.loss(params, val_pairs));
        check_divergence(report.train_loss.back(), "train", epoch);
        if (report.val_loss.back() < report.val_loss[static_cast<std::size_t>(report.selected_epoch)]) {
            report.selected_epoch = epoch;
            report.best = params;
        }
    }
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

RunReport train(const TrainConfig& cfg, const GmmSpec& gmm, const Scheduler& source) {
    cfg.validate();
    const auto train_pairs = build_pairs(gmm, source, cfg.train_count, cfg.seed, cfg.teacher);
    const auto val_pairs = build_pairs(gmm, source, cfg.val_count, cfg.seed ^ 0x9E3779B97F4A7C15ULL, cfg.teacher);
    const DistillationObjective objective(gmm, source, make_grid(cfg.grid, cfg.steps(), source), cfg.method);
    return train(cfg, objective, train_pairs, val_pairs,
                 SchedulerParams::linear_init(cfg.degree, cfg.enable_decoupled ? cfg.steps() : 0));
}

namespace {

// Fits one monotone curve B(s_k) = y_k at interior nodes by damped
// Gauss-Newton on the logits (minimum-norm step, since there are usually
// more logits than nodes).
struct CurveFit {
    std::vector<double> logits;
    double residual;
    int iterations;
};

// Starting logits whose control points sample the piecewise-linear
// interpolant of (0,0), (s_k, y_k), (1,1). Increments are floored so no
// logit starts in a flat region of the softmax.
std::vector<double> polygon_logits(std::span<const double> nodes, std::span<const double> targets, int degree) {
    std::vector<double> xs{0.0}, ys{0.0};
    xs.insert(xs.end(), nodes.begin(), nodes.end());
    ys.insert(ys.end(), targets.begin(), targets.end());
    xs.push_back(1.0);
    ys.push_back(1.0);
    auto interp = [&](double s) {
        const auto it = std::upper_bound(xs.begin(), xs.end(), s);
        if (it == xs.end()) return 1.0;
        const auto j = static_cast<std::size_t>(it - xs.begin());
        const double w = (s - xs[j - 1]) / (xs[j] - xs[j - 1]);
        return ys[j - 1] + w * (ys[j] - ys[j - 1]);
    };
    const double floor = 1e-4 / degree;
    std::vector<double> theta(static_cast<std::size_t>(degree));
    for (int j = 0; j < degree; ++j) {
        const double inc = interp(static_cast<double>(j + 1) / degree) - interp(static_cast<double>(j) / degree);
        theta[static_cast<std::size_t>(j)] = std::log(std::max(inc, floor));
    }
    return theta;
}

CurveFit fit_curve(std::span<const double> nodes, std::span<const double> targets, int degree, double tol,
                   int max_iterations) {
    const Eigen::Index rows = static_cast<Eigen::Index>(nodes.size());
    const Eigen::Index cols = degree;

    auto residuals = [&](const LogitVector& theta) {
        const ControlVector c = monotone_points_from_logits(theta);
        Eigen::VectorXd r(rows);
        for (Eigen::Index k = 0; k < rows; ++k) r[k] = bezier_eval(c, nodes[k]) - targets[k];
        return r;
    };

    std::vector<double> theta = polygon_logits(nodes, targets, degree);
    Eigen::VectorXd r = residuals(LogitVector(theta));
    double cost = r.squaredNorm();
    double damping = 1e-3;
    int iter = 0;
    for (; iter < max_iterations && rows > 0 && r.lpNorm<Eigen::Infinity>() > 0.1 * tol; ++iter) {
        const LogitVector current(theta);
        const auto psi_jac = monotone_points_jacobian(current);
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(rows, cols);
        for (Eigen::Index k = 0; k < rows; ++k) {
            for (int i = 1; i < degree; ++i) {
                const double b = bernstein(i, degree, nodes[k]);
                for (Eigen::Index j = 0; j < cols; ++j) {
                    jac(k, j) += b * psi_jac[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(cols) +
                                             static_cast<std::size_t>(j)];
                }
            }
        }
        const Eigen::MatrixXd gram = jac * jac.transpose();
        bool improved = false;
        for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
            const Eigen::MatrixXd damped = gram + damping * Eigen::MatrixXd::Identity(rows, rows);
            const Eigen::VectorXd step = -jac.transpose() * damped.ldlt().solve(r);
            std::vector<double> trial(theta);
            for (Eigen::Index j = 0; j < cols; ++j) trial[static_cast<std::size_t>(j)] += step[j];
            if (!std::all_of(trial.begin(), trial.end(), [](double v) { return std::isfinite(v); })) {
                damping *= 4.0;
                continue;
            }
            const Eigen::VectorXd r_trial = residuals(LogitVector(trial));
            const double trial_cost = r_trial.squaredNorm();
            if (trial_cost < cost) {
                theta = std::move(trial);
                r = r_trial;
                cost = trial_cost;
                damping = std::max(damping / 3.0, 1e-12);
                improved = true;
            } else {
                damping *= 4.0;
            }
        }
        if (!improved) break;
    }
    return {std::move(theta), rows > 0 ? r.lpNorm<Eigen::Infinity>() : 0.0, iter};
}

}  // namespace

TimestepFit fit_scheduler_to_timesteps(const Scheduler& source, std::span<const double> timesteps, int degree,
                                       double tol, int max_iterations) {
    const TimeGrid grid(std::vector<double>(timesteps.begin(), timesteps.end()), GridKind::uniform_time);
    if (degree < 1) throw std::domain_error("fit_scheduler_to_timesteps: degree must be >= 1");
    const int steps = grid.steps();

    std::vector<double> nodes;
    std::vector<double> alpha_targets;
    std::vector<double> sigma_targets;
    for (int k = 1; k < steps; ++k) {
        nodes.push_back(static_cast<double>(k) / steps);
        const ScheduleSample v = source.eval(grid.times()[static_cast<std::size_t>(k)]);
        alpha_targets.push_back(v.alpha);
        sigma_targets.push_back(1.0 - v.sigma);
    }
    const CurveFit fa = fit_curve(nodes, alpha_targets, degree, tol, max_iterations);
    const CurveFit fs = fit_curve(nodes, sigma_targets, degree, tol, max_iterations);

    TimestepFit fit{LogitVector(fa.logits), LogitVector(fs.logits), {}, 0.0, false,
                    std::max(fa.iterations, fs.iterations)};
    fit.nodes.push_back(0.0);
    fit.nodes.insert(fit.nodes.end(), nodes.begin(), nodes.end());
    fit.nodes.push_back(1.0);

    const Scheduler fitted = fit.scheduler();
    for (std::size_t k = 0; k < fit.nodes.size(); ++k) {
        const ScheduleSample want = source.eval(grid.times()[k]);
        const ScheduleSample got = fitted.eval(fit.nodes[k]);
        fit.residual = std::max({fit.residual, std::abs(got.alpha - want.alpha), std::abs(got.sigma - want.sigma)});
    }
    fit.converged = fit.residual < tol;
    return fit;
}

}  // namespace bezierflow
