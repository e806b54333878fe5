#pragma once
// Independent reference computations used by the tests. Nothing here calls
// into the spectral machinery beyond `discriminant`.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "kdvlab/hill.hpp"
#include "kdvlab/potential.hpp"

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

/// Delta(lambda) by classical RK4 with `steps` fixed steps on [0,1].
inline double discriminant_rk4(const kdvlab::Potential& q, double lambda, int steps = 4096) {
    // state (y1, y1', y2, y2')
    auto rhs = [&](double x, const std::array<double, 4>& s) {
        const double c = q(x) - lambda;
        return std::array<double, 4>{s[1], c * s[0], s[3], c * s[2]};
    };
    std::array<double, 4> s{1.0, 0.0, 0.0, 1.0};
    const double h = 1.0 / steps;
    for (int i = 0; i < steps; ++i) {
        const double x = i * h;
        auto add = [](const std::array<double, 4>& a, const std::array<double, 4>& b, double f) {
            return std::array<double, 4>{a[0] + f * b[0], a[1] + f * b[1], a[2] + f * b[2], a[3] + f * b[3]};
        };
        const auto k1 = rhs(x, s);
        const auto k2 = rhs(x + h / 2, add(s, k1, h / 2));
        const auto k3 = rhs(x + h / 2, add(s, k2, h / 2));
        const auto k4 = rhs(x + h, add(s, k3, h));
        for (int j = 0; j < 4; ++j) s[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    }
    return s[0] + s[3];
}

/// Eigenvalues of the Hill operator in the Fourier basis e^{i pi (2k + parity) x},
/// |k| <= K. parity 0 gives the periodic problem, 1 the antiperiodic one.
inline std::vector<double> hill_matrix_eigenvalues(const kdvlab::Potential& q, int parity, int K = 32) {
    const int L = 2 * K + 1;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(L, L);
    for (int a = 0; a < L; ++a) {
        const double fa = pi * (2.0 * (a - K) + parity);
        H(a, a) = fa * fa + q.mean();
        for (int b = 0; b < L; ++b)
            if (a != b) H(a, b) = q.coeff(a - b);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + L);
    return ev;
}

/// lambda_n^-, lambda_n^+ from the matrix eigensolve.
inline std::pair<double, double> gap_edges_matrix(const kdvlab::Potential& q, int n, int K = 32) {
    const auto ev = hill_matrix_eigenvalues(q, n % 2, K);
    // antiperiodic: pairs for n = 1, 3, ...; periodic: lambda_0^+ first, then n = 2, 4, ...
    return {ev[n - 1], ev[n]};
}

/// (1/pi) loop integral of lambda Delta_dot / sqrt(Delta^2 - 4) on a rectangle
/// around gap n, the branch carried by continuity. Returns |I_n| since the
/// overall sign of a continued branch is arbitrary.
inline double action_rectangle(const kdvlab::Potential& q, double lo, double hi, double pad, double height,
                               int per_side = 160) {
    // Gauss-Legendre nodes by Newton on P_N
    const int N = per_side;
    std::vector<double> x(N), w(N);
    for (int i = 0; i < N; ++i) {
        double z = std::cos(pi * (i + 0.75) / (N + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= N; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = N * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= N; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = N * (z * p1 - p0) / (z * z - 1.0);
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    // ascending so that each side is traversed from a to b (w is symmetric)
    std::sort(x.begin(), x.end());
    const cplx c[4] = {{lo - pad, -height}, {hi + pad, -height}, {hi + pad, height}, {lo - pad, height}};
    cplx sum = 0.0, prev_root = 0.0;
    bool first = true;
    for (int side = 0; side < 4; ++side) {
        const cplx a = c[side], b = c[(side + 1) % 4];
        for (int i = 0; i < N; ++i) {
            const cplx lam = 0.5 * (a + b) + 0.5 * (b - a) * x[i];
            const auto d = kdvlab::discriminant(q, lam, 1e-13);
            cplx r = std::sqrt(d.delta * d.delta - 4.0);
            if (!first && std::abs(r + prev_root) < std::abs(r - prev_root)) r = -r;
            first = false;
            prev_root = r;
            sum += w[i] * 0.5 * (b - a) * lam * d.delta_dot / r;
        }
    }
    return std::abs(sum / pi);
}

}  // namespace oracle
