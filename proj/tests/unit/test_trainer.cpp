#include <cmath>
#include <numeric>

#include "bezierflow/path_transform.hpp"
#include "bezierflow/trainer.hpp"
#include "doctest.h"

using namespace bezierflow;

namespace {

const GmmSpec& ring() {
    static const GmmSpec gmm = GmmSpec::ring(8, 8.0, 0.5);
    return gmm;
}

DistillationObjective objective(int steps, FixedMethod m = FixedMethod::rk1) {
    return DistillationObjective(ring(), Scheduler::linear(), make_grid(GridKind::uniform_time, steps, Scheduler::linear()),
                                 m);
}

TrainConfig small_config() {
    TrainConfig cfg;
    cfg.degree = 6;
    cfg.train_count = 16;
    cfg.val_count = 16;
    cfg.epochs = 3;
    cfg.batch_size = 8;
    cfg.lr = 0.05;
    return cfg;
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("config validation names the field") {
    TrainConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.method = FixedMethod::rk2;
    cfg.nfe = 3;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("train.nfe"), std::invalid_argument);
    cfg = TrainConfig{};
    cfg.lr = -1.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("train.lr"), std::invalid_argument);
}

TEST_CASE("teacher pairs") {
    State mu(2);
    mu << -1.0, 3.0;
    const auto pairs = build_pairs(GmmSpec({1.0}, {mu}, {0.25}), Scheduler::linear(), 20, 8);
    for (const auto& p : pairs) CHECK((p.x1 - (mu + 0.5 * p.x0)).norm() <= 1e-4);
    CHECK_THROWS_AS(build_pairs(ring(), Scheduler::linear(), 0, 1), std::domain_error);
    const auto again = build_pairs(GmmSpec({1.0}, {mu}, {0.25}), Scheduler::linear(), 20, 8);
    for (std::size_t i = 0; i < pairs.size(); ++i) CHECK(pairs[i].x1 == again[i].x1);
}

TEST_CASE("self-distillation limit") {
    const auto pairs = build_pairs(ring(), Scheduler::linear(), 10, 3);
    const VelocityFn u = VelocityField(ring(), Scheduler::linear()).as_function();
    double total = 0.0;
    for (const auto& p : pairs) total += (integrate_adaptive(u, p.x0, 0.0, 1.0).endpoint - p.x1).squaredNorm();
    CHECK(total / pairs.size() < 1e-6);
}

TEST_CASE("linear init at three steps deviates from the teacher") {
    const auto pairs = build_pairs(ring(), Scheduler::linear(), 50, 4);
    CHECK(objective(3).loss(SchedulerParams::linear_init(32), pairs) > 0.1);
}

TEST_CASE("loss is stable in the number of pairs") {
    const auto obj = objective(3);
    const auto params = SchedulerParams::linear_init(8);
    const auto small = obj.pair_losses(params, build_pairs(ring(), Scheduler::linear(), 100, 21));
    const auto large = obj.pair_losses(params, build_pairs(ring(), Scheduler::linear(), 200, 22));
    auto stats = [](const std::vector<double>& v) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        return std::pair{mean, var / (v.size() - 1)};
    };
    const auto [m1, v1] = stats(small);
    const auto [m2, v2] = stats(large);
    CHECK(std::abs(m1 - m2) <= 3.0 * std::sqrt(v1 / small.size() + v2 / large.size()));
}

TEST_CASE("finite-difference gradient") {
    const auto flat = [](std::span<const double> th) { return th[0] * th[0] + 0.0 * th[1]; };
    const std::vector<double> theta{0.7, 2.0};
    const auto g = finite_difference_gradient(flat, theta, 1e-5);
    CHECK(g[0] == doctest::Approx(1.4).epsilon(1e-8));
    CHECK(std::abs(g[1]) <= 1e-6);

    // Central and one-sided differences on the real loss agree to O(h).
    const auto pairs = build_pairs(ring(), Scheduler::linear(), 8, 5);
    const auto obj = objective(3);
    const auto init = SchedulerParams::linear_init(4);
    const auto loss = [&](std::span<const double> th) { return obj.loss(init.with_values(th), pairs); };
    const auto base = init.flatten();
    const double h = 1e-5;
    const auto central = finite_difference_gradient(loss, base, h);
    const double f0 = loss(base);
    for (std::size_t i = 0; i < base.size(); ++i) {
        auto probe = base;
        probe[i] += h * std::max(1.0, std::abs(base[i]));
        const double forward = (loss(probe) - f0) / (h * std::max(1.0, std::abs(base[i])));
        CHECK(std::abs(forward - central[i]) <= 1e-3 * std::max(1.0, std::abs(central[i])));
    }

    const auto bad = [](std::span<const double>) { return NAN; };
    CHECK_THROWS_AS(finite_difference_gradient(bad, theta, 1e-5), GradientError);
}

TEST_CASE("clipping and rmsprop") {
    std::vector<double> g{3.0, 4.0};
    CHECK(clip_global_norm(g, 1.0) == doctest::Approx(5.0));
    CHECK(g[0] == doctest::Approx(0.6));
    CHECK(g[1] == doctest::Approx(0.8));
    std::vector<double> small{0.1, 0.2};
    clip_global_norm(small, 1.0);
    CHECK(small == std::vector<double>{0.1, 0.2});

    // First step of PyTorch RMSprop without momentum: lr * g / (sqrt((1-a) g^2) + eps).
    RmsProp opt(1, 0.01, 0.99, 1e-8, 0.0);
    std::vector<double> p{1.0};
    const std::vector<double> grad{2.0};
    opt.step(p, grad);
    CHECK(p[0] == doctest::Approx(1.0 - 0.01 * 2.0 / (std::sqrt(0.01 * 4.0) + 1e-8)).epsilon(1e-14));
}

TEST_CASE("params flatten round trip") {
    SchedulerParams p{{1.0, 2.0}, {3.0, 4.0, 5.0}, {0.1}};
    const auto flat = p.flatten();
    CHECK(flat == std::vector<double>{1, 2, 3, 4, 5, 0.1});
    const auto back = p.with_values(flat);
    CHECK(back.sigma == p.sigma);
    CHECK(back.offsets == p.offsets);
    CHECK_THROWS_AS(p.with_values(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("zero learning rate leaves everything fixed") {
    TrainConfig cfg = small_config();
    cfg.lr = 0.0;
    const RunReport r = train(cfg, ring(), Scheduler::linear());
    CHECK(r.best.alpha == SchedulerParams::linear_init(cfg.degree).alpha);
    for (double v : r.val_loss) CHECK(v == r.val_loss.front());
    CHECK(r.selected_epoch == 0);
}

TEST_CASE("training improves and is deterministic") {
    TrainConfig cfg = small_config();
    const RunReport a = train(cfg, ring(), Scheduler::linear());
    const RunReport b = train(cfg, ring(), Scheduler::linear());
    CHECK(a.val_loss.size() == static_cast<std::size_t>(cfg.epochs + 1));
    CHECK(a.val_loss[static_cast<std::size_t>(a.selected_epoch)] < a.val_loss.front());
    CHECK(a.val_loss == b.val_loss);
    CHECK(a.train_loss == b.train_loss);
    CHECK(a.best.flatten() == b.best.flatten());
    double best_so_far = a.val_loss.front();
    for (double v : a.val_loss) {
        CHECK(std::min(best_so_far, v) <= best_so_far);
        best_so_far = std::min(best_so_far, v);
    }
    CHECK(best_so_far == a.val_loss[static_cast<std::size_t>(a.selected_epoch)]);
}

TEST_CASE("decoupled offsets are trained when enabled") {
    TrainConfig cfg = small_config();
    cfg.enable_decoupled = true;
    const RunReport r = train(cfg, ring(), Scheduler::linear());
    CHECK(r.best.offsets.size() == static_cast<std::size_t>(cfg.steps()));
}

TEST_CASE("fit to timesteps") {
    const auto uniform = fit_scheduler_to_timesteps(Scheduler::linear(), std::vector<double>{0, 0.25, 0.5, 0.75, 1}, 32);
    CHECK(uniform.converged);
    CHECK(uniform.residual <= 1e-12);
    CHECK(uniform.iterations == 0);

    const std::vector<double> t{0.0, 0.12, 0.71, 1.0};
    const TimestepFit fit = fit_scheduler_to_timesteps(Scheduler::linear(), t, 32);
    CHECK(fit.converged);
    CHECK(fit.residual < 1e-4);
    const TransformContext ctx(Scheduler::linear(), fit.scheduler());
    const VelocityFn u = VelocityField(ring(), Scheduler::linear()).as_function();
    AdaptiveOptions opts;
    opts.rtol = 1e-9;
    opts.atol = 1e-11;
    for (const auto& x0 : sample_source(2, 5, 31)) {
        for (std::size_t k = 1; k < 3; ++k) {
            CHECK(ctx.scale(fit.nodes[k]) == doctest::Approx(1.0).epsilon(1e-4));
            const State xbar = integrate_adaptive(ctx.transformed_field(u), x0, 0.0, fit.nodes[k], opts).endpoint;
            const State x = integrate_adaptive(u, x0, 0.0, t[k], opts).endpoint;
            CHECK((xbar - x).norm() <= 1e-3);
        }
    }

    // Degree 1 cannot bend away from the straight line.
    const auto tight = fit_scheduler_to_timesteps(Scheduler::linear(), std::vector<double>{0, 0.1, 0.2, 1}, 1);
    CHECK_FALSE(tight.converged);
    CHECK_THROWS_AS(fit_scheduler_to_timesteps(Scheduler::linear(), std::vector<double>{0, 0.5, 0.4, 1}, 8),
                    std::invalid_argument);
}

}
