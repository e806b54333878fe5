#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kdvlab/invariants.hpp"
#include "oracles.hpp"

using namespace kdvlab;
constexpr double pi = std::numbers::pi;

namespace {

const Potential& desk() {
    static const Potential q = families::cosine_modes({{1, 0.2}, {2, 0.2}});
    return q;
}

const Analysis& desk_analysis() {
    static const Analysis a = analyze(desk(), 12);
    return a;
}

}  // namespace

TEST_CASE("actions: free potential and small cosine") {
    const auto a0 = actions(periodic_spectrum(Potential{}, 6));
    for (int n = 1; n <= 6; ++n) CHECK(a0.I[n] == 0.0);

    const auto s = periodic_spectrum(families::cosine_mode(1, 0.05), 4);
    const auto I = action(s, 1);
    CHECK(I.I == doctest::Approx(s.gamma[1] * s.gamma[1] / (8 * pi)).epsilon(0.02));
    CHECK_FALSE(I.flagged);
}

TEST_CASE("actions match the rectangle contour oracle") {
    const auto& a = desk_analysis();
    const auto& s = a.spec;
    // frozen oracle values (Gauss-Legendre on a rectangle around each gap)
    CHECK(a.act.I[1] == doctest::Approx(6.301807180426337e-03).epsilon(1e-8));
    CHECK(a.act.I[2] == doctest::Approx(3.215207073078078e-03).epsilon(1e-8));
    const double o1 = oracle::action_rectangle(desk(), s.lambda_minus[1], s.lambda_plus[1], 3.0, 2.0);
    CHECK(a.act.I[1] == doctest::Approx(o1).epsilon(1e-5));
    for (int n = 1; n <= 12; ++n) {
        CHECK(a.act.I[n] >= -1e-12);
        if (s.gamma[n] == 0.0) CHECK(a.act.I[n] == 0.0);
    }
}

TEST_CASE("gap law 8 n pi I_n / gamma_n^2 tends to 1") {
    const auto q = families::power_law(12, 0.1, 2.0);
    const auto s = periodic_spectrum(q, 12);
    const auto act = actions(s);
    double prev = INFINITY;
    for (int n = 2; n <= 12; ++n) {
        const double dev = std::abs(8 * n * pi * act.I[n] / (s.gamma[n] * s.gamma[n]) - 1.0);
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev <= 1e-6);
}

TEST_CASE("moment invariants") {
    const auto& a = desk_analysis();
    const auto& s = a.spec;
    for (int n = 1; n <= 12; ++n) {
        for (int k = 1; k <= a.mom.K; ++k)
            if (k <= s.N && s.gamma[k] == 0.0) {
                CHECK(a.mom.at(2, n, k) == 0.0);
                CHECK(a.mom.at(4, n, k) == 0.0);
            }
        for (int m : {1, 3, 5}) CHECK(a.mom.R.at(m)[n] >= -1e-12);
        if (s.gamma[n] > 1e-6) CHECK(a.mom.R.at(1)[n] == doctest::Approx(a.act.I[n]).epsilon(1e-6));
    }

    // Omega^(0) = 2 pi delta
    for (int n = 1; n <= 4; ++n)
        for (int k = 1; k <= 4; ++k) {
            if (!s.open(k)) continue;
            const auto A = gap_acosh_samples(desk(), s, k, 96);
            CHECK(std::abs(omega_moment(s, a.psi[n], k, A, 0) - (n == k ? 2 * pi : 0.0)) <= 1e-8);
        }

    // odd Omega and even R vanish in quadrature form too
    const auto A1 = gap_acosh_samples(desk(), s, 1, 96);
    CHECK(omega_moment(s, a.psi[2], 1, A1, 3, true) == 0.0);
    CHECK(std::abs(omega_moment(s, a.psi[2], 1, A1, 3, false)) <= 1e-9);
    CHECK(std::abs(r_moment(s, 1, A1, 2, false)) <= 1e-9);
    CHECK(std::abs(r_moment(s, 1, A1, 4, false)) <= 1e-9);
}

TEST_CASE("one-gap moment asymptotics") {
    for (int n : {1, 2}) {
        const auto q = families::cosine_mode(n, 0.01);
        const auto a = analyze(q, 4);
        const double g = a.spec.gamma[n];
        CHECK(a.mom.at(2, n, n) == doctest::Approx(g * g / (16 * n * n * pi)).epsilon(0.10));
        CHECK(n * a.mom.at(4, n, n) ==
              doctest::Approx(3.0 / (16 * n * pi) * std::pow(g, 4) / (64 * n * n * pi * pi)).epsilon(0.15));
    }
}

TEST_CASE("frequencies") {
    const auto z = analyze(Potential{}, 4);
    for (int n = 1; n <= 4; ++n) {
        CHECK(z.freq.omega1[n] == std::pow(2 * n * pi, 3));
        CHECK(z.freq.omega2[n] == std::pow(2 * n * pi, 5));
    }

    const auto& a = desk_analysis();
    for (int n = 1; n <= 12; ++n) {
        const double w3 = std::pow(2 * n * pi, 3);
        CHECK(std::abs(a.freq.omega1[n] - w3 - a.freq.omega1_star[n]) <= 4e-16 * w3);
        CHECK(std::isfinite(a.freq.omega2_star[n]));
        CHECK(a.freq.tail2[n] <= 0.1 * std::max(std::abs(a.freq.omega2_star[n]), 1e-300));
        CHECK(n * std::abs(a.freq.omega1_star[n] + 6 * a.act.I[n]) <= 0.1);
    }

    // mean shift
    const auto shifted = analyze(desk().with_mean(0.4), 4);
    for (int n = 1; n <= 4; ++n) {
        const double w = 2 * n * pi;
        CHECK(shifted.freq.omega1[n] ==
              doctest::Approx(w * w * w + 6 * 0.4 * w + a.freq.omega1_star[n]).epsilon(1e-10));
    }

    for (int n : {1, 2}) {
        const auto s = analyze(families::cosine_mode(n, 0.01), 3);
        const double I = s.act.I[n];
        CHECK(s.freq.omega1_star[n] == doctest::Approx(-6 * I).epsilon(1e-3));
        CHECK(s.freq.omega2_star[n] == doctest::Approx(-20 * std::pow(2 * n * pi, 2) * I).epsilon(1e-2));
    }
}

TEST_CASE("sigma-root sensitivity is below the tail estimate at small amplitude") {
    const auto q = families::cosine_modes({{1, 0.05}, {2, 0.05}});
    const auto a = analyze(q, 6);
    auto crude = a.psi;
    for (int n = 1; n <= 6; ++n)
        for (int k = 1; k < static_cast<int>(crude[n].sigma.size()); ++k)
            if (k != n) crude[n].sigma[k] = a.spec.tau[k];
    const auto mt = moments(q, a.spec, crude, 6, a.mom.K);
    for (int n = 1; n <= 2; ++n) {
        const double diff = std::abs(omega1_star(mt, n) - a.freq.omega1_star[n]);
        CHECK(diff <= std::max(a.freq.tail1[n], 1e-3 * std::abs(a.freq.omega1_star[n])));
    }
}

TEST_CASE("Hamiltonians") {
    double H0, H1, H2;
    direct_hamiltonians(Potential{}, 256, H0, H1, H2);
    CHECK(H0 == 0.0);
    CHECK(H1 == 0.0);
    CHECK(H2 == 0.0);

    // 2 eps cos(2 pi x): H0 = eps^2, H1 = eps^2 (2 pi)^2
    const double e = 0.1;
    direct_hamiltonians(families::cosine_mode(1, e), 256, H0, H1, H2);
    CHECK(H0 == doctest::Approx(e * e).epsilon(1e-13));
    CHECK(H1 == doctest::Approx(e * e * 4 * pi * pi).epsilon(1e-13));

    const auto& a = desk_analysis();
    CHECK(a.ham.H0 >= 0.0);
    CHECK(a.ham.H0_actions == doctest::Approx(a.ham.H0).epsilon(1e-5));
    CHECK(a.ham.H2_star == doctest::Approx(a.ham.H2_star_direct).epsilon(1e-4));
    CHECK_FALSE(a.ham.h1_disagree);
}

TEST_CASE("frequency Jacobian near zero") {
    const auto fam = cosine_family({1, 2});
    AnalysisOptions opt;
    const auto k1 = frequency_jacobian(fam, {1, 2}, {0.05, 0.05}, 1e-3, Model::kdv, opt);
    for (int i = 0; i < 2; ++i) {
        CHECK(k1.J(i, i) == doctest::Approx(-6.0).epsilon(0.05));
        CHECK(std::abs(k1.J(i, 1 - i)) <= 0.2 * std::abs(k1.J(i, i)));
    }
    CHECK(k1.negative_definite);
    const auto k2 = frequency_jacobian(fam, {1, 2}, {0.05, 0.05}, 1e-3, Model::kdv2, opt);
    for (int i = 0; i < 2; ++i) {
        const double n = i + 1;
        CHECK(k2.J(i, i) == doctest::Approx(-80 * n * n * pi * pi).epsilon(0.05));
    }
}
