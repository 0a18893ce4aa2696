#include <cmath>
#include <numbers>
#include <random>

#include "bezierflow/scheduler.hpp"
#include "doctest.h"

using namespace bezierflow;

TEST_SUITE("scheduler") {

TEST_CASE("linear and vp samples") {
    const auto v = Scheduler::linear().eval(0.5);
    CHECK(v.alpha == 0.5);
    CHECK(v.sigma == 0.5);
    CHECK(v.dalpha == 1.0);
    CHECK(v.dsigma == -1.0);
    const auto w = Scheduler::vp().eval(0.0);
    CHECK(w.alpha == 0.0);
    CHECK(w.sigma == 1.0);
    CHECK_THROWS_AS(Scheduler::linear().eval(1.2), std::domain_error);
    CHECK_THROWS_AS(Scheduler::vp().eval(-0.1), std::domain_error);
}

TEST_CASE("equal logits reproduce the linear scheduler") {
    for (int degree : {1, 4, 32}) {
        const Scheduler b = Scheduler::bezier_linear_init(degree);
        for (int k = 0; k <= 1000; ++k) {
            const double s = k / 1000.0;
            const auto x = b.eval(s);
            const auto y = Scheduler::linear().eval(s);
            CHECK(std::abs(x.alpha - y.alpha) <= 1e-10);
            CHECK(std::abs(x.sigma - y.sigma) <= 1e-10);
            CHECK(std::abs(x.dalpha - y.dalpha) <= 1e-10);
            CHECK(std::abs(x.dsigma - y.dsigma) <= 1e-10);
        }
    }
}

TEST_CASE("snr values") {
    const Scheduler lin = Scheduler::linear();
    CHECK(lin.snr(0.5) == doctest::Approx(1.0));
    CHECK(lin.snr(0.0) == 0.0);
    CHECK(std::isinf(lin.snr(1.0)));
    CHECK(lin.invert_snr(1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(lin.invert_snr(3.0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(Scheduler::vp().invert_snr(1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(lin.invert_snr(-1.0), SnrRangeError);
}

TEST_CASE("snr round trip and monotonicity for random bezier schedulers") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> a(32), b(32);
        for (double& v : a) v = normal(rng);
        for (double& v : b) v = normal(rng);
        const Scheduler s = Scheduler::bezier(LogitVector(a), LogitVector(b));
        for (int k = 0; k < 100; ++k) {
            const double t = unif(rng);
            CHECK(s.invert_snr(s.snr(t)) == doctest::Approx(t).epsilon(1e-9));
        }
        double prev = -1.0;
        for (int k = 0; k < 1000; ++k) {
            const double r = s.snr(k / 1000.0);
            CHECK(r > prev);
            prev = r;
        }
    }
}

TEST_CASE("snr derivative matches central difference") {
    const Scheduler s = Scheduler::bezier(LogitVector({0.1, -0.4, 1.2, 0.3}), LogitVector({0.8, 0.0, -0.5, 0.2}));
    for (double t : {0.1, 0.3, 0.6, 0.8}) {
        const double fd = (s.snr(t + 1e-6) - s.snr(t - 1e-6)) / 2e-6;
        CHECK(s.snr_derivative(t) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("time grids") {
    const auto g = make_grid(GridKind::uniform_time, 4, Scheduler::linear());
    CHECK(g.times() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(make_grid(GridKind::uniform_time, 1, Scheduler::linear()).times() == std::vector<double>{0.0, 1.0});

    const auto mid = make_grid(GridKind::uniform_snr, 2, Scheduler::linear());
    CHECK(mid.times()[1] == doctest::Approx(0.5).epsilon(1e-12));
    // log-SNR thirds of [log rho(1e-3), log rho(1 - 1e-3)] for s / (1 - s).
    const auto thirds = make_grid(GridKind::uniform_snr, 3, Scheduler::linear());
    CHECK(thirds.times()[1] == doctest::Approx(0.0909366566623432).epsilon(1e-10));
    CHECK(thirds.times()[2] == doctest::Approx(0.9090633433376568).epsilon(1e-10));
    CHECK(thirds.times().front() == 0.0);
    CHECK(thirds.times().back() == 1.0);

    CHECK_THROWS_AS(make_grid(GridKind::uniform_time, 0, Scheduler::linear()), std::domain_error);
    CHECK_THROWS_AS(TimeGrid({0.0, 0.6, 0.5, 1.0}, GridKind::uniform_time), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid({0.1, 1.0}, GridKind::uniform_time), std::invalid_argument);
}

TEST_CASE("kind names round trip") {
    for (auto k : {SchedulerKind::linear, SchedulerKind::vp, SchedulerKind::bezier}) {
        CHECK(scheduler_kind_from_string(to_string(k)) == k);
    }
}

}
