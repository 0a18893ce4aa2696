#include <cmath>
#include <numbers>
#include <random>

#include "bezierflow/gmm.hpp"
#include "bezierflow/ode.hpp"
#include "bezierflow/path_transform.hpp"
#include "doctest.h"

using namespace bezierflow;

namespace {

Scheduler sample_target(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> a(16), b(16);
    for (double& v : a) v = normal(rng);
    for (double& v : b) v = normal(rng);
    return Scheduler::bezier(LogitVector(a), LogitVector(b));
}

}  // namespace

TEST_SUITE("path_transform") {

TEST_CASE("identity transform") {
    const TransformContext ctx(Scheduler::vp(), Scheduler::vp());
    for (int k = 0; k <= 100; ++k) {
        const double s = k / 100.0;
        CHECK(std::abs(ctx.time_map(s) - s) <= 1e-9);
        CHECK(std::abs(ctx.scale(s) - 1.0) <= 1e-10);
        CHECK(std::abs(ctx.time_map_derivative(s) - 1.0) <= 1e-8);
        CHECK(std::abs(ctx.scale_log_derivative(s)) <= 1e-8);
    }
}

TEST_CASE("boundary values") {
    const TransformContext ctx(Scheduler::linear(), sample_target(1));
    CHECK(ctx.time_map(0.0) == 0.0);
    CHECK(ctx.time_map(1.0) == 1.0);
    CHECK(ctx.scale(0.0) == 1.0);
    CHECK(ctx.scale(1.0) == 1.0);
}

TEST_CASE("vp source, linear target") {
    const TransformContext ctx(Scheduler::vp(), Scheduler::linear());
    CHECK(ctx.time_map(0.5) == doctest::Approx(0.5).epsilon(1e-12));
    const double fd = (ctx.time_map(0.5 + 1e-6) - ctx.time_map(0.5 - 1e-6)) / 2e-6;
    CHECK(ctx.time_map_derivative(0.5) == doctest::Approx(4.0 / std::numbers::pi).epsilon(1e-12));
    CHECK(std::abs(ctx.time_map_derivative(0.5) - fd) <= 1e-6);
}

TEST_CASE("both quotient forms of the scale agree") {
    std::uniform_real_distribution<double> unif(0.01, 0.99);
    std::mt19937_64 rng(2);
    const Scheduler target = sample_target(3);
    const Scheduler source = Scheduler::vp();
    const TransformContext ctx(source, target);
    for (int k = 0; k < 100; ++k) {
        const double s = unif(rng);
        const auto bar = target.eval(s);
        const auto src = source.eval(ctx.time_map(s));
        CHECK(std::abs(bar.sigma / src.sigma - bar.alpha / src.alpha) <= 1e-8);
        CHECK(std::abs(ctx.scale(s) - bar.alpha / src.alpha) <= 1e-8);
    }
}

TEST_CASE("log-scale derivative matches finite differences") {
    std::uniform_real_distribution<double> unif(0.02, 0.98);
    std::mt19937_64 rng(4);
    const TransformContext ctx(Scheduler::linear(), sample_target(5));
    for (int k = 0; k < 100; ++k) {
        const double s = unif(rng);
        const double fd = (std::log(ctx.scale(s + 1e-6)) - std::log(ctx.scale(s - 1e-6))) / 2e-6;
        CHECK(std::abs(fd - ctx.scale_log_derivative(s)) <= 1e-6);
        const double fdt = (ctx.time_map(s + 1e-6) - ctx.time_map(s - 1e-6)) / 2e-6;
        CHECK(std::abs(fdt - ctx.time_map_derivative(s)) <= 1e-6);
    }
}

TEST_CASE("transformed velocity") {
    const TransformContext same(Scheduler::linear(), Scheduler::linear());
    const VelocityFn u = VelocityField(GmmSpec::ring(8, 8.0, 0.5), Scheduler::linear()).as_function();
    State x(2);
    x << 1.5, -0.7;
    for (double s : {0.0, 0.3, 0.9}) CHECK((same.transformed_velocity(u, s, x) - u(x, s)).norm() <= 1e-8);

    const TransformContext ctx(Scheduler::linear(), sample_target(6));
    const VelocityFn zero = [](const State& y, double) { return State(State::Zero(y.size())); };
    for (double s : {0.2, 0.5, 0.8}) {
        CHECK((ctx.transformed_velocity(zero, s, x) - ctx.scale_log_derivative(s) * x).norm() <= 1e-12);
    }
}

TEST_CASE("endpoint preservation under the GMM field") {
    const VelocityFn u = VelocityField(GmmSpec::ring(8, 8.0, 0.5), Scheduler::linear()).as_function();
    AdaptiveOptions opts;
    opts.rtol = 1e-8;
    opts.atol = 1e-10;
    for (std::uint64_t seed : {7, 8}) {
        const TransformContext ctx(Scheduler::linear(), sample_target(seed));
        for (const auto& x0 : sample_source(2, 5, seed)) {
            const State a = integrate_adaptive(u, x0, 0.0, 1.0, opts).endpoint;
            const State b = integrate_adaptive(ctx.transformed_field(u), x0, 0.0, 1.0, opts).endpoint;
            CHECK((a - b).norm() <= 1e-4);
        }
    }
}

}
