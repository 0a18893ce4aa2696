#include <cmath>
#include <random>

#include "bezierflow/bezier.hpp"
#include "doctest.h"

using namespace bezierflow;

TEST_SUITE("bezier") {

TEST_CASE("bernstein basis values") {
    CHECK(bernstein(0, 1, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(bernstein(2, 2, 1.0) == 1.0);
    CHECK(bernstein(1, 3, 0.25) == doctest::Approx(0.421875).epsilon(1e-15));
    CHECK(bernstein(0, 4, 0.0) == 1.0);
    CHECK(bernstein(3, 4, 0.0) == 0.0);
}

TEST_CASE("bernstein rejects bad indices") {
    CHECK_THROWS_AS(bernstein(-1, 3, 0.5), std::domain_error);
    CHECK_THROWS_AS(bernstein(4, 3, 0.5), std::domain_error);
    CHECK_THROWS_AS(bernstein(1, 3, 1.5), std::domain_error);
}

TEST_CASE("control vector validation") {
    CHECK_NOTHROW(ControlVector({0.0, 0.3, 0.3, 1.0}));
    CHECK_THROWS_AS(ControlVector({0.0, 0.5, 0.4, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ControlVector({0.1, 0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ControlVector({0.0, 0.5, 0.9}), std::invalid_argument);
    CHECK_THROWS_AS(ControlVector({0.0}), std::invalid_argument);
    CHECK_THROWS_AS(LogitVector({1.0, NAN}), std::domain_error);
    CHECK_THROWS_AS(LogitVector(std::vector<double>{}), std::domain_error);
}

TEST_CASE("evaluation") {
    const ControlVector uniform({0.0, 0.25, 0.5, 0.75, 1.0});
    for (double lam : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
        CHECK(bezier_eval(uniform, lam) == doctest::Approx(lam).epsilon(1e-14));
        CHECK(bezier_derivative(uniform, lam) == doctest::Approx(1.0).epsilon(1e-13));
    }
    CHECK(bezier_eval(ControlVector({0.0, 0.0, 1.0}), 0.5) == doctest::Approx(0.25).epsilon(1e-15));
    const ControlVector run({0.0, 0.0, 0.0, 0.4, 1.0});
    CHECK(bezier_eval(run, 0.0) == 0.0);
    CHECK(bezier_eval(run, 1.0) == 1.0);
    CHECK(bezier_derivative(run, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("derivative matches central difference") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal(0.0, 1.5);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> theta(16);
        for (double& t : theta) t = normal(rng);
        const auto c = monotone_points_from_logits(LogitVector(theta));
        const double lam = unif(rng);
        const double h = 1e-6;
        const double fd = (bezier_eval(c, lam + h) - bezier_eval(c, lam - h)) / (2 * h);
        CHECK(std::abs(fd - bezier_derivative(c, lam)) <= 1e-6);
    }
}

TEST_CASE("cumulative softmax control points") {
    const auto c = monotone_points_from_logits(LogitVector({1.0, 1.0, 1.0, 1.0}));
    REQUIRE(c.degree() == 4);
    for (int i = 0; i <= 4; ++i) CHECK(c[i] == doctest::Approx(i / 4.0).epsilon(1e-15));

    const auto two = monotone_points_from_logits(LogitVector({std::log(1.0), std::log(3.0)}));
    REQUIRE(two.degree() == 2);
    CHECK(two[1] == doctest::Approx(0.25).epsilon(1e-15));

    // Extreme logits stay finite and pinned.
    const auto wide = monotone_points_from_logits(LogitVector({800.0, -800.0, 0.0}));
    CHECK(wide[0] == 0.0);
    CHECK(wide[3] == 1.0);
    CHECK(std::isfinite(wide[1]));
}

TEST_CASE("points jacobian matches finite differences") {
    const LogitVector theta({0.3, -1.2, 0.8, 2.0, -0.1});
    const auto jac = monotone_points_jacobian(theta);
    const int n = theta.size();
    REQUIRE(jac.size() == static_cast<std::size_t>((n - 1) * n));
    for (int j = 0; j < n; ++j) {
        std::vector<double> up(theta.values().begin(), theta.values().end());
        std::vector<double> down = up;
        up[static_cast<std::size_t>(j)] += 1e-6;
        down[static_cast<std::size_t>(j)] -= 1e-6;
        const auto cu = monotone_points_from_logits(LogitVector(up));
        const auto cd = monotone_points_from_logits(LogitVector(down));
        for (int i = 1; i < n; ++i) {
            const double fd = (cu[i] - cd[i]) / 2e-6;
            CHECK(jac[static_cast<std::size_t>((i - 1) * n + j)] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

}
