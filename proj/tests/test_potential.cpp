#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kdvlab/potential.hpp"

using namespace kdvlab;

TEST_CASE("make: empty input is the zero potential") {
    const auto q = Potential::make({}, 0.0);
    CHECK(q.is_zero());
    CHECK(q.evaluate(0.3) == 0.0);
    CHECK(q.max_mode() == 0);
}

TEST_CASE("make: reality mirroring") {
    const auto q = Potential::make({{1, 0.1}}, 0.0);
    CHECK(q.coeff(-1) == cplx(0.1, 0.0));
    CHECK(q.evaluate(0.0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(std::abs(q.evaluate(0.25)) <= 1e-14);
    for (double x : {0.1, 0.37, 0.81}) CHECK(q(x) == doctest::Approx(0.2 * std::cos(2 * std::numbers::pi * x)));
}

TEST_CASE("make: two-mode potential is real on a grid") {
    const auto q = Potential::make({{1, 0.1}, {3, cplx(0.0, 0.05)}}, 0.0);
    double worst = 0.0;
    for (int j = 0; j < 128; ++j) worst = std::max(worst, std::abs(q.evaluate_complex(j / 128.0).imag()));
    CHECK(worst <= 1e-15);
    CHECK(q.coeff(-3) == cplx(0.0, -0.05));
}

TEST_CASE("make: rejects bad input") {
    CHECK_THROWS_AS(Potential::make({{2, 0.1}, {2, 0.2}}), std::invalid_argument);
    CHECK_THROWS_AS(Potential::make({{2, 0.1}, {-2, 0.1}}), std::invalid_argument);
    CHECK_THROWS_AS(Potential::make({{0, 0.1}}), std::invalid_argument);
    CHECK_THROWS_AS(Potential::make({{1, cplx(NAN, 0.0)}}), std::invalid_argument);
    CHECK_THROWS_AS(Potential::make({}, INFINITY), std::invalid_argument);
}

TEST_CASE("families are real and the trapezoid mean equals the mean field") {
    const std::vector<Potential> qs = {
        families::cosine_mode(2, 0.05, 0.3),
        families::cosine_modes({{1, 0.2}, {4, -0.1}}, -1.5),
        families::smooth_random(8, 0.2, 0.6, 7u, 0.25),
        families::power_law(16, 0.1, 1.5),
    };
    for (const auto& q : qs) {
        double worst = 0.0;
        for (int j = 0; j < 128; ++j) worst = std::max(worst, std::abs(q.evaluate_complex(j / 128.0).imag()));
        CHECK(worst <= 1e-12 * std::max(q.coeff_l1(), 1e-300));
        double m = 0.0;
        for (int j = 0; j < 1024; ++j) m += q(j / 1024.0);
        CHECK(std::abs(m / 1024.0 - q.mean()) <= 1e-10);
    }
}

TEST_CASE("smooth_random is reproducible from its seed") {
    const auto a = families::smooth_random(6, 0.1, 0.5, 42u);
    const auto b = families::smooth_random(6, 0.1, 0.5, 42u);
    const auto c = families::smooth_random(6, 0.1, 0.5, 43u);
    for (int n = 1; n <= 6; ++n) CHECK(a.coeff(n) == b.coeff(n));
    CHECK(a.coeff(1) != c.coeff(1));
    CHECK(std::abs(a.coeff(3)) == doctest::Approx(0.1 * 0.25));
}

TEST_CASE("derivatives are exact in Fourier space") {
    const auto q = families::cosine_mode(3, 0.1);
    const double k = 6 * std::numbers::pi;
    for (double x : {0.0, 0.13, 0.5}) {
        CHECK(q.derivative(x, 1) == doctest::Approx(-0.2 * k * std::sin(k * x)).epsilon(1e-13));
        CHECK(q.derivative(x, 2) == doctest::Approx(-0.2 * k * k * std::cos(k * x)).epsilon(1e-13));
    }
}

TEST_CASE("mean handling") {
    const auto q = families::cosine_mode(1, 0.1, 2.0);
    CHECK(q.zero_mean().mean() == 0.0);
    CHECK(q.zero_mean().coeff(1) == q.coeff(1));
    CHECK(q.with_mean(-1.0)(0.0) == doctest::Approx(-1.0 + 0.2));
    CHECK(q.scaled(2.0).coeff(1) == cplx(0.2, 0.0));
    CHECK(q.sup_bound() == doctest::Approx(2.2));
}
