#include "bezierflow/verify.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "bezierflow/bezier.hpp"
#include "bezierflow/gmm.hpp"
#include "bezierflow/ode.hpp"
#include "bezierflow/path_transform.hpp"
#include "bezierflow/scheduler.hpp"
#include "bezierflow/scheduler_io.hpp"
#include "bezierflow/svg.hpp"
#include "bezierflow/trainer.hpp"

namespace bezierflow {

namespace {

struct Outcome {
    bool passed;
    std::string detail;
};

std::string describe(const char* what, double value, double bound) {
    std::ostringstream os;
    os << what << " " << value << " (bound " << bound << ")";
    return os.str();
}

Outcome bound_check(const char* what, double value, double bound) {
    return {value <= bound, describe(what, value, bound)};
}

LogitVector random_logits(Rng& rng, int n, double spread = 1.5) {
    std::normal_distribution<double> normal(0.0, spread);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = normal(rng);
    return LogitVector(std::move(v));
}

Scheduler random_bezier(Rng& rng, int n = 8, double spread = 1.0) {
    return Scheduler::bezier(random_logits(rng, n, spread), random_logits(rng, n, spread));
}

VelocityFn exponential_field() {
    return [](const State& x, double) { return x; };
}

Outcome partition_of_unity() {
    double worst = 0.0;
    for (int n : {1, 2, 5, 8, 16, 32}) {
        for (int k = 0; k <= 1000; ++k) {
            const double lam = k / 1000.0;
            double total = 0.0;
            for (int i = 0; i <= n; ++i) total += bernstein(i, n, lam);
            worst = std::max(worst, std::abs(total - 1.0));
        }
    }
    return bound_check("max |sum b - 1|", worst, 1e-12);
}

Outcome endpoint_interpolation() {
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = monotone_points_from_logits(random_logits(rng, 1 + trial % 32));
        if (bezier_eval(c, 0.0) != 0.0 || bezier_eval(c, 1.0) != 1.0) return {false, "endpoint mismatch"};
    }
    return {true, "200 random control vectors"};
}

Outcome curve_monotonicity() {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = monotone_points_from_logits(random_logits(rng, 32, 2.0));
        double prev = 0.0;
        for (int k = 0; k <= 1000; ++k) {
            const double v = bezier_eval(c, k / 1000.0);
            if (v < prev) return {false, "decrease found in trial " + std::to_string(trial)};
            prev = v;
        }
    }
    return {true, "200 random degree-32 curves on a 1e-3 grid"};
}

Outcome derivative_fd() {
    Rng rng(3);
    std::uniform_real_distribution<double> unif(0.01, 0.99);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = monotone_points_from_logits(random_logits(rng, 32));
        const double lam = unif(rng);
        const double h = 1e-6;
        const double fd = (bezier_eval(c, lam + h) - bezier_eval(c, lam - h)) / (2 * h);
        worst = std::max(worst, std::abs(fd - bezier_derivative(c, lam)));
    }
    return bound_check("max |B' - FD|", worst, 1e-6);
}

Outcome logit_shift() {
    Rng rng(4);
    std::uniform_real_distribution<double> shift(-50.0, 50.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto theta = random_logits(rng, 16);
        std::vector<double> moved(theta.values().begin(), theta.values().end());
        const double c = shift(rng);
        for (double& v : moved) v += c;
        const auto a = monotone_points_from_logits(theta);
        const auto b = monotone_points_from_logits(LogitVector(moved));
        for (int i = 0; i <= a.degree(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return bound_check("max point change", worst, 1e-12);
}

Outcome scheduler_boundaries() {
    Rng rng(5);
    std::vector<Scheduler> all{Scheduler::linear(), Scheduler::vp()};
    for (int i = 0; i < 50; ++i) all.push_back(random_bezier(rng, 1 + i % 32, 2.0));
    for (const auto& s : all) {
        const auto a = s.eval(0.0);
        const auto b = s.eval(1.0);
        if (a.alpha != 0.0 || a.sigma != 1.0 || b.alpha != 1.0 || b.sigma != 0.0) {
            return {false, std::string("boundary violated for kind ") + std::string(to_string(s.kind()))};
        }
    }
    return {true, "linear, vp and 50 random bezier schedulers"};
}

Outcome snr_monotone() {
    Rng rng(6);
    for (int trial = 0; trial < 1000; ++trial) {
        const Scheduler s = random_bezier(rng, 32, 1.5);
        double prev = -1.0;
        for (int k = 0; k < 1000; ++k) {
            const double v = s.snr(k / 1000.0);
            if (!(v > prev)) return {false, "non-increasing snr in trial " + std::to_string(trial)};
            prev = v;
        }
    }
    return {true, "1000 random degree-32 schedulers on a 1e-3 grid"};
}

Outcome snr_inverse() {
    Rng rng(7);
    std::uniform_real_distribution<double> log_y(std::log(1e-4), std::log(1e4));
    double worst = 0.0;
    std::vector<Scheduler> all{Scheduler::linear(), Scheduler::vp()};
    for (int i = 0; i < 20; ++i) all.push_back(random_bezier(rng, 32));
    for (const auto& s : all) {
        for (int k = 0; k < 50; ++k) {
            const double y = std::exp(log_y(rng));
            worst = std::max(worst, std::abs(s.snr(s.invert_snr(y)) - y) / std::max(1.0, y));
        }
    }
    return bound_check("max relative snr error", worst, 1e-9);
}

Outcome scheduler_derivatives() {
    Rng rng(8);
    std::uniform_real_distribution<double> unif(0.01, 0.99);
    double worst = 0.0;
    std::vector<Scheduler> all{Scheduler::linear(), Scheduler::vp()};
    for (int i = 0; i < 20; ++i) all.push_back(random_bezier(rng, 32));
    for (const auto& s : all) {
        for (int k = 0; k < 20; ++k) {
            const double t = unif(rng);
            const double h = 1e-6;
            const auto up = s.eval(t + h);
            const auto down = s.eval(t - h);
            const auto mid = s.eval(t);
            worst = std::max(worst, std::abs((up.alpha - down.alpha) / (2 * h) - mid.dalpha));
            worst = std::max(worst, std::abs((up.sigma - down.sigma) / (2 * h) - mid.dsigma));
        }
    }
    return bound_check("max |derivative - FD|", worst, 1e-6);
}

Scheduler faulty_target() {
    // Non-monotone alpha control points that push alphabar below zero.
    return Scheduler::bezier_from_points(ControlVector::unchecked({0.0, -0.5, 0.2, 1.0}),
                                         ControlVector({0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}));
}

Outcome endpoint_preservation(const VerifyOptions& opts) {
    Rng rng(9);
    const GmmSpec gmm = GmmSpec::ring(8, 8.0, 0.5);
    const VelocityField field(gmm, Scheduler::linear());
    const VelocityFn u = field.as_function();
    AdaptiveOptions tight;
    tight.rtol = 1e-8;
    tight.atol = 1e-10;
    const auto x0s = sample_source(2, 5, 10);
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        const Scheduler target = opts.inject_nonmonotone_points ? faulty_target() : random_bezier(rng, 16);
        const TransformContext ctx(Scheduler::linear(), target);
        const VelocityFn ubar = ctx.transformed_field(u);
        for (const auto& x0 : x0s) {
            const State a = integrate_adaptive(u, x0, 0.0, 1.0, tight).endpoint;
            const State b = integrate_adaptive(ubar, x0, 0.0, 1.0, tight).endpoint;
            worst = std::max(worst, (a - b).norm());
        }
    }
    return bound_check("max endpoint L2 gap", worst, 1e-4);
}

Outcome identity_transform() {
    Rng rng(11);
    const GmmSpec gmm = GmmSpec::ring(8, 8.0, 0.5);
    double worst = 0.0;
    for (const Scheduler& s : {Scheduler::linear(), Scheduler::vp(), random_bezier(rng, 8)}) {
        const TransformContext ctx(s, s);
        const VelocityFn u = VelocityField(gmm, s).as_function();
        for (int k = 1; k < 100; ++k) {
            const double t = k / 100.0;
            const auto ts = ctx.sample(t);
            worst = std::max({worst, std::abs(ts.source_time - t), std::abs(ts.scale - 1.0),
                              std::abs(ts.dtime_ds - 1.0), std::abs(ts.dlog_scale_ds)});
            State x(2);
            x << std::cos(k), std::sin(3.0 * k);
            worst = std::max(worst, (ctx.transformed_velocity(u, t, x) - u(x, t)).norm());
        }
    }
    return bound_check("max deviation from identity", worst, 1e-8);
}

Outcome trajectory_correspondence() {
    Rng rng(12);
    const GmmSpec gmm = GmmSpec::ring(8, 8.0, 0.5);
    const VelocityFn u = VelocityField(gmm, Scheduler::linear()).as_function();
    AdaptiveOptions tight;
    tight.rtol = 1e-10;
    tight.atol = 1e-12;
    double worst = 0.0;
    const auto x0s = sample_source(2, 3, 13);
    for (int trial = 0; trial < 3; ++trial) {
        const TransformContext ctx(Scheduler::linear(), random_bezier(rng, 12));
        const VelocityFn ubar = ctx.transformed_field(u);
        for (const auto& x0 : x0s) {
            for (double s : {0.25, 0.5, 0.75}) {
                const auto ts = ctx.sample(s);
                const State xbar = integrate_adaptive(ubar, x0, 0.0, s, tight).endpoint;
                const State x = integrate_adaptive(u, x0, 0.0, ts.source_time, tight).endpoint;
                worst = std::max(worst, (xbar - ts.scale * x).norm() / std::max(1.0, xbar.norm()));
            }
        }
    }
    return bound_check("max relative mismatch", worst, 1e-5);
}

Outcome transform_derivatives() {
    Rng rng(14);
    std::uniform_real_distribution<double> unif(0.01, 0.99);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Scheduler src = trial % 2 == 0 ? Scheduler::linear() : Scheduler::vp();
        const TransformContext ctx(src, random_bezier(rng, 16));
        for (int k = 0; k < 10; ++k) {
            const double s = unif(rng);
            const double h = 1e-6;
            const double fd_t = (ctx.time_map(s + h) - ctx.time_map(s - h)) / (2 * h);
            const double fd_c = (std::log(ctx.scale(s + h)) - std::log(ctx.scale(s - h))) / (2 * h);
            const auto ts = ctx.sample(s);
            worst = std::max({worst, std::abs(fd_t - ts.dtime_ds), std::abs(fd_c - ts.dlog_scale_ds)});
        }
    }
    return bound_check("max |derivative - FD|", worst, 1e-6);
}

Outcome responsibilities_simplex() {
    Rng rng(15);
    std::normal_distribution<double> normal(0.0, 6.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const VelocityField field(GmmSpec::ring(8, 8.0, 0.5), Scheduler::linear());
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        State x(2);
        x << normal(rng), normal(rng);
        const auto r = field.responsibilities(x, unif(rng));
        double total = 0.0;
        for (double v : r) {
            if (v < 0.0) return {false, "negative responsibility"};
            total += v;
        }
        worst = std::max(worst, std::abs(total - 1.0));
    }
    return bound_check("max |sum - 1|", worst, 1e-12);
}

Outcome single_gaussian_map() {
    State mu(2);
    mu << 1.5, -2.0;
    const double gamma = 0.7;
    const GmmSpec gmm({1.0}, {mu}, {gamma * gamma});
    const VelocityFn u = VelocityField(gmm, Scheduler::linear()).as_function();
    AdaptiveOptions tight;
    tight.rtol = 1e-8;
    tight.atol = 1e-10;
    double worst = 0.0;
    for (const auto& x0 : sample_source(2, 20, 16)) {
        const State end = integrate_adaptive(u, x0, 0.0, 1.0, tight).endpoint;
        worst = std::max(worst, (end - (mu + gamma * x0)).norm());
    }
    return bound_check("max |x1 - (mu + gamma x0)|", worst, 1e-4);
}

Outcome field_finite() {
    Rng rng(17);
    std::normal_distribution<double> normal(0.0, 10.0);
    const VelocityField field(GmmSpec::ring(8, 8.0, 0.5), random_bezier(rng, 16));
    for (int k = 0; k <= 1000; ++k) {
        const double s = std::min(k / 1000.0, 1.0 - 1e-6);
        State x(2);
        x << normal(rng), normal(rng);
        const State v = field.velocity(x, s);
        if (v.size() != 2 || !v.allFinite()) return {false, "bad velocity at s=" + std::to_string(s)};
    }
    return {true, "1001 samples on [0, 1-1e-6]"};
}

Outcome interpolant_consistency() {
    Rng rng(18);
    std::normal_distribution<double> normal(0.0, 5.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const GmmSpec gmm = GmmSpec::ring(8, 8.0, 0.5);
    double worst = 0.0;
    for (const Scheduler& sched : {Scheduler::linear(), Scheduler::vp(), random_bezier(rng, 8)}) {
        const VelocityField field(gmm, sched);
        for (int k = 0; k < 200; ++k) {
            const double s = unif(rng);
            State x(2);
            x << normal(rng), normal(rng);
            const auto v = sched.eval(s);
            const State rebuilt =
                v.alpha * field.posterior_target_mean(x, s) + v.sigma * field.posterior_source_mean(x, s);
            worst = std::max(worst, (rebuilt - x).norm() / std::max(1.0, x.norm()));
        }
    }
    return bound_check("max |alpha E[x1] + sigma E[x0] - x|", worst, 1e-10);
}

Outcome convergence_order() {
    State x0(1);
    x0 << 1.0;
    const double exact = std::exp(1.0);
    std::ostringstream detail;
    bool ok = true;
    for (FixedMethod m : {FixedMethod::rk1, FixedMethod::rk2}) {
        const double lo = m == FixedMethod::rk1 ? 1.8 : 3.6;
        const double hi = m == FixedMethod::rk1 ? 2.2 : 4.4;
        double prev_err = 0.0;
        for (int steps : {16, 32, 64, 128}) {
            const auto traj =
                integrate_fixed(exponential_field(), x0, make_grid(GridKind::uniform_time, steps, Scheduler::linear()), m);
            const double err = std::abs(traj.endpoint()[0] - exact);
            if (prev_err > 0.0) {
                const double ratio = prev_err / err;
                detail << to_string(m) << ":" << ratio << " ";
                ok = ok && ratio >= lo && ratio <= hi;
            }
            prev_err = err;
        }
    }
    return {ok, detail.str()};
}

Outcome nfe_bookkeeping() {
    State x0 = State::Ones(2);
    for (int steps = 1; steps <= 12; ++steps) {
        const TimeGrid grid = make_grid(GridKind::uniform_time, steps, Scheduler::linear());
        int calls = 0;
        const VelocityFn f = [&calls](const State& x, double) {
            ++calls;
            return State(-x);
        };
        for (FixedMethod m : {FixedMethod::rk1, FixedMethod::rk2}) {
            calls = 0;
            const auto traj = integrate_fixed(f, x0, grid, m);
            if (traj.nfe != steps * evals_per_step(m) || calls != traj.nfe) return {false, "nfe mismatch"};
        }
    }
    int calls = 0;
    const VelocityFn f = [&calls](const State& x, double) {
        ++calls;
        return State(-x);
    };
    const auto res = integrate_adaptive(f, x0, 0.0, 1.0);
    if (res.nfe != calls) return {false, "adaptive nfe mismatch"};
    return {true, "rk1, rk2 for M=1..12 and RK45"};
}

Outcome adaptive_exponential() {
    State x0(1);
    x0 << 1.0;
    double worst = 0.0;
    for (double rtol : {1e-4, 1e-6, 1e-8}) {
        AdaptiveOptions opts;
        opts.rtol = rtol;
        opts.atol = rtol * 1e-2;
        const auto res = integrate_adaptive(exponential_field(), x0, 0.0, 1.0, opts);
        worst = std::max(worst, std::abs(res.endpoint[0] - std::exp(1.0)) / std::exp(1.0) / rtol);
    }
    return bound_check("max error / rtol", worst, 10.0);
}

Outcome determinism() {
    const GmmSpec gmm = GmmSpec::ring(8, 8.0, 0.5);
    const auto a = build_pairs(gmm, Scheduler::linear(), 8, 99);
    const auto b = build_pairs(gmm, Scheduler::linear(), 8, 99);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].x0 != b[i].x0 || a[i].x1 != b[i].x1) return {false, "pairs differ"};
    }
    Rng rng(19);
    const TransformContext ctx(Scheduler::linear(), random_bezier(rng, 8));
    const VelocityFn u = VelocityField(gmm, Scheduler::linear()).as_function();
    const TimeGrid grid = make_grid(GridKind::uniform_time, 5, Scheduler::linear());
    const auto t1 = solve_student(ctx, u, a[0].x0, grid, FixedMethod::rk2);
    const auto t2 = solve_student(ctx, u, a[0].x0, grid, FixedMethod::rk2);
    for (std::size_t i = 0; i < t1.states.size(); ++i) {
        if (t1.states[i] != t2.states[i]) return {false, "student trajectories differ"};
    }
    return {true, "pairs and student trajectories bitwise equal"};
}

Outcome gradient_quadratic() {
    Rng rng(20);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int dim = 12;
    Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(dim, dim, [&] { return normal(rng); });
    const Eigen::MatrixXd q = a.transpose() * a;
    const Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(dim, [&] { return normal(rng); });
    const auto f = [&](std::span<const double> th) {
        const Eigen::Map<const Eigen::VectorXd> x(th.data(), dim);
        return 0.5 * x.dot(q * x) + b.dot(x);
    };
    std::vector<double> theta(dim);
    for (double& v : theta) v = normal(rng);
    const auto grad = finite_difference_gradient(f, theta, 1e-4);
    const Eigen::Map<const Eigen::VectorXd> x(theta.data(), dim);
    const Eigen::VectorXd exact = q * x + b;
    double worst = 0.0;
    for (int i = 0; i < dim; ++i) worst = std::max(worst, std::abs(grad[static_cast<std::size_t>(i)] - exact[i]));
    return bound_check("max |FD - exact|", worst, 1e-8);
}

Outcome gradient_clipping() {
    Rng rng(21);
    std::normal_distribution<double> normal(0.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> g(64);
        for (double& v : g) v = normal(rng);
        const double before = clip_global_norm(g, 1.0);
        double sq = 0.0;
        for (double v : g) sq += v * v;
        if (before > 1.0 && std::sqrt(sq) > 1.0 + 1e-12) return {false, "post-clip norm above 1"};
    }
    return {true, "100 random gradients"};
}

Outcome checkpoint_rule() {
    TrainConfig cfg;
    cfg.nfe = 2;
    cfg.degree = 6;
    cfg.train_count = 12;
    cfg.val_count = 12;
    cfg.epochs = 4;
    cfg.batch_size = 6;
    cfg.lr = 0.05;
    const GmmSpec gmm = GmmSpec::ring(8, 8.0, 0.5);
    const RunReport report = train(cfg, gmm, Scheduler::linear());
    std::size_t argmin = 0;
    for (std::size_t e = 1; e < report.val_loss.size(); ++e) {
        if (report.val_loss[e] < report.val_loss[argmin]) argmin = e;
    }
    if (static_cast<std::size_t>(report.selected_epoch) != argmin) return {false, "selected epoch is not the argmin"};
    const DistillationObjective objective(gmm, Scheduler::linear(),
                                          make_grid(cfg.grid, cfg.steps(), Scheduler::linear()), cfg.method);
    const auto val = build_pairs(gmm, Scheduler::linear(), cfg.val_count, cfg.seed ^ 0x9E3779B97F4A7C15ULL);
    const double again = objective.loss(report.best, val);
    if (again != report.val_loss[argmin]) return {false, "best parameters do not reproduce best val loss"};
    return {true, "selected epoch " + std::to_string(report.selected_epoch)};
}

Outcome scheduler_round_trip() {
    Rng rng(22);
    for (int trial = 0; trial < 10; ++trial) {
        const Scheduler s = random_bezier(rng, 32, 2.0);
        const Scheduler back = scheduler_from_json(nlohmann::json::parse(scheduler_to_json(s).dump()));
        for (int k = 0; k <= 1000; ++k) {
            const auto a = s.eval(k / 1000.0);
            const auto b = back.eval(k / 1000.0);
            if (std::abs(a.alpha - b.alpha) > 1e-12 || std::abs(a.sigma - b.sigma) > 1e-12) {
                return {false, "round trip changed the curves"};
            }
        }
    }
    return {true, "10 random schedulers on a 1e-3 grid"};
}

Outcome svg_determinism() {
    Rng rng(23);
    const Scheduler s = random_bezier(rng, 8);
    if (render_scheduler_svg(s) != render_scheduler_svg(s)) return {false, "scheduler svg differs"};
    if (render_gallery_svg() != render_gallery_svg()) return {false, "gallery svg differs"};
    return {true, "identical bytes on repeat"};
}

struct Property {
    const char* name;
    std::function<Outcome(const VerifyOptions&)> run;
};

template <typename F>
std::function<Outcome(const VerifyOptions&)> plain(F f) {
    return [f](const VerifyOptions&) { return f(); };
}

const std::vector<Property>& registry() {
    static const std::vector<Property> props{
        {"bezier.partition_of_unity", plain(partition_of_unity)},
        {"bezier.endpoint_interpolation", plain(endpoint_interpolation)},
        {"bezier.monotonicity", plain(curve_monotonicity)},
        {"bezier.derivative_matches_fd", plain(derivative_fd)},
        {"bezier.logit_shift_invariance", plain(logit_shift)},
        {"scheduler.boundary_exactness", plain(scheduler_boundaries)},
        {"scheduler.snr_monotone", plain(snr_monotone)},
        {"scheduler.invert_snr_consistency", plain(snr_inverse)},
        {"scheduler.derivatives_match_fd", plain(scheduler_derivatives)},
        {"transform.endpoint_preservation", endpoint_preservation},
        {"transform.identity", plain(identity_transform)},
        {"transform.trajectory_correspondence", plain(trajectory_correspondence)},
        {"transform.derivatives_match_fd", plain(transform_derivatives)},
        {"gmm.responsibilities_simplex", plain(responsibilities_simplex)},
        {"gmm.single_gaussian_flow_map", plain(single_gaussian_map)},
        {"gmm.finite_velocity", plain(field_finite)},
        {"gmm.interpolant_consistency", plain(interpolant_consistency)},
        {"ode.convergence_order", plain(convergence_order)},
        {"ode.nfe_bookkeeping", plain(nfe_bookkeeping)},
        {"ode.adaptive_exponential", plain(adaptive_exponential)},
        {"ode.determinism", plain(determinism)},
        {"trainer.gradient_quadratic_exact", plain(gradient_quadratic)},
        {"trainer.gradient_clipping", plain(gradient_clipping)},
        {"trainer.checkpoint_rule", plain(checkpoint_rule)},
        {"cli.scheduler_round_trip", plain(scheduler_round_trip)},
        {"cli.svg_determinism", plain(svg_determinism)},
    };
    return props;
}

}  // namespace

std::vector<std::string> property_names() {
    std::vector<std::string> names;
    for (const auto& p : registry()) names.emplace_back(p.name);
    return names;
}

std::vector<PropertyResult> run_properties(const VerifyOptions& opts) {
    std::vector<PropertyResult> results;
    for (const auto& p : registry()) {
        PropertyResult r{p.name, false, {}};
        try {
            const Outcome o = p.run(opts);
            r.passed = o.passed;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace bezierflow
