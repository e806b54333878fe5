#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kdvlab/hill.hpp"
#include "kdvlab/seqspace.hpp"
#include "oracles.hpp"

using namespace kdvlab;
constexpr double pi = std::numbers::pi;

TEST_CASE("discriminant of the free operator") {
    const Potential q0;
    for (double lam : {-3.0, 0.0, 1.0, 40.0, 400.0}) {
        const auto d = discriminant(q0, lam);
        const cplx s = std::sqrt(cplx(lam));
        CHECK(std::abs(d.delta - 2.0 * std::cos(s)) <= 1e-11 * std::max(1.0, std::abs(d.delta)));
        CHECK(d.wronskian_residual <= 1e-11);
    }
    const cplx lam(30.0, 4.0);
    const auto d = discriminant(q0, lam);
    CHECK(std::abs(d.delta - 2.0 * std::cos(std::sqrt(lam))) <= 1e-11 * std::abs(d.delta));
    // derivative of 2 cos sqrt(l) is -sin(sqrt l)/sqrt l
    CHECK(std::abs(d.delta_dot + std::sin(std::sqrt(lam)) / std::sqrt(lam)) <= 1e-10);
}

TEST_CASE("discriminant agrees with a fixed-step oracle") {
    const auto q = families::cosine_mode(1, 0.2);
    const auto d = discriminant(q, 0.0);
    CHECK(d.delta.real() == doctest::Approx(1.997973593476078).epsilon(1e-12));
    for (double lam : {-2.0, 5.0, 39.0}) {
        CHECK(discriminant(q, lam).delta.real() ==
              doctest::Approx(oracle::discriminant_rk4(q, lam)).epsilon(1e-11));
    }
    // the complex path on the real axis matches the real fast path
    const auto c = discriminant(q, cplx(5.0, 0.0));
    CHECK(std::abs(c.delta - discriminant(q, 5.0).delta) <= 1e-12);
}

TEST_CASE("excess equals (delta^2 - 4)/4") {
    const auto q = families::cosine_modes({{1, 0.2}, {2, 0.2}});
    for (double lam : {-1.0, 9.0, 60.0}) {
        const auto d = discriminant(q, lam);
        CHECK(std::abs(d.excess - (d.delta * d.delta - 4.0) / 4.0) <= 1e-11);
    }
}

TEST_CASE("free spectrum and constant shift") {
    const auto sp = periodic_spectrum(Potential{}, 8);
    CHECK(std::abs(sp.lambda_plus[0]) <= 1e-12);
    for (int n = 1; n <= 8; ++n) {
        CHECK(sp.lambda_plus[n] == doctest::Approx(n * n * pi * pi).epsilon(1e-12));
        CHECK(sp.gamma[n] == 0.0);
    }
    CHECK(sp.open_gaps().empty());
    const auto sc = periodic_spectrum(Potential::make({}, 1.5), 4);
    for (int n = 1; n <= 4; ++n) CHECK(sc.lambda_minus[n] == doctest::Approx(n * n * pi * pi + 1.5).epsilon(1e-12));
    CHECK(sc.lambda_plus[0] == doctest::Approx(1.5));
}

TEST_CASE("gap edges match the Fourier matrix oracle") {
    const auto q = families::cosine_mode(1, 0.05);
    const auto sp = periodic_spectrum(q, 4);
    CHECK(sp.lambda_minus[1] == doctest::Approx(9.819572758266045).epsilon(1e-12));
    CHECK(sp.lambda_plus[1] == doctest::Approx(9.919572718164572).epsilon(1e-12));
    CHECK(sp.lambda_minus[2] == doctest::Approx(39.478396495779975).epsilon(1e-12));
    CHECK(sp.lambda_plus[2] == doctest::Approx(39.478523146898368).epsilon(1e-12));
    const auto q2 = families::cosine_modes({{1, 0.2}, {2, 0.2}});
    const auto s2 = periodic_spectrum(q2, 6);
    for (int n = 1; n <= 4; ++n) {
        const auto [lo, hi] = oracle::gap_edges_matrix(q2, n);
        CHECK(s2.lambda_minus[n] == doctest::Approx(lo).epsilon(1e-11));
        CHECK(s2.lambda_plus[n] == doctest::Approx(hi).epsilon(1e-11));
    }
    CHECK(s2.lambda_plus[0] == doctest::Approx(oracle::hill_matrix_eigenvalues(q2, 0).front()).epsilon(1e-11));
}

TEST_CASE("ordering, Dirichlet and critical points inside the gaps") {
    const auto q = families::cosine_modes({{1, 0.2}, {2, 0.2}});
    const auto sp = periodic_spectrum(q, 16);
    for (int n = 1; n <= 16; ++n) {
        CHECK(sp.lambda_minus[n] <= sp.lambda_plus[n]);
        CHECK(sp.lambda_plus[n - 1] < sp.lambda_minus[n]);
        CHECK(sp.gamma[n] >= 0.0);
        CHECK(sp.mu[n] >= sp.lambda_minus[n] - 1e-9);
        CHECK(sp.mu[n] <= sp.lambda_plus[n] + 1e-9);
        CHECK(sp.lambda_dot[n] >= sp.lambda_minus[n] - 1e-9);
        CHECK(sp.lambda_dot[n] <= sp.lambda_plus[n] + 1e-9);
        if (sp.gamma[n] == 0.0) {
            CHECK(std::abs(sp.lambda_dot[n] - sp.tau[n]) <= 1e-8);
        } else if (sp.gamma[n] > 1e-5) {
            // critical point sits within O(gamma^2 / n) of the gap midpoint
            CHECK(n * std::abs(sp.lambda_dot[n] - sp.tau[n]) <= 1e-1 * sp.gamma[n] * sp.gamma[n]);
        }
    }
}

TEST_CASE("product representation of delta^2 - 4") {
    const auto q = families::cosine_modes({{1, 0.2}, {2, 0.2}});
    const int N = 16;
    const auto sp = periodic_spectrum(q, N);
    for (double lam : {-5.0, 20.0, 60.0, 150.0, 300.0}) {
        const auto d = discriminant(q, lam);
        const double lhs = (d.delta * d.delta - 4.0).real();
        double prod = 4.0 * (sp.lambda_plus[0] - lam);
        for (int m = 1; m <= N; ++m) {
            const double mm = m * m * pi * pi;
            prod *= (sp.lambda_plus[m] - lam) * (sp.lambda_minus[m] - lam) / ((mm - lam) * (mm - lam));
        }
        const cplx r = std::sqrt(cplx(lam));
        const double sinc = std::real(std::sin(r) / r);
        prod *= sinc * sinc;
        CHECK(std::abs(prod / lhs - 1.0) <= 1e-6);
    }
}

TEST_CASE("shifted spectrum") {
    const auto q = families::cosine_mode(2, 0.1);
    const auto a = periodic_spectrum(q, 4).shifted(0.7);
    const auto b = periodic_spectrum(q.with_mean(0.7), 4);
    for (int n = 1; n <= 4; ++n) {
        CHECK(a.lambda_plus[n] == doctest::Approx(b.lambda_plus[n]).epsilon(1e-12));
        CHECK(a.gamma[n] == doctest::Approx(b.gamma[n]).epsilon(1e-9));
    }
}

TEST_CASE("bad arguments") {
    CHECK_THROWS_AS(periodic_spectrum(Potential{}, -1), std::invalid_argument);
}
