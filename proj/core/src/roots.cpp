#include "kdvlab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kdvlab/quadrature.hpp"

namespace kdvlab {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

int effective_M(const HillSpectrum& spec, int M) { return std::clamp(M, 1, spec.N); }

std::vector<int> open_upto(const HillSpectrum& spec, int M) {
    std::vector<int> o;
    for (int m = 1; m <= effective_M(spec, M); ++m)
        if (spec.gamma[m] > 0.0) o.push_back(m);
    return o;
}

void check_index(const HillSpectrum& spec, int n, const char* who) {
    if (n < 1 || n > spec.N)
        throw std::out_of_range(std::string(who) + ": index " + std::to_string(n) + " outside spectrum");
}

/// sin(z)/z for complex z
cplx sinc(cplx z) {
    if (std::abs(z) < 1e-4) {
        const cplx z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

/// sin(sqrt(l))/sqrt(l) * prod_{m<=M} m^2 pi^2 / (m^2 pi^2 - l): the closed-gap tail
cplx tail_factor(cplx l, int M) {
    const cplx r = std::sqrt(l);
    // nearest m <= M to sqrt(l)/pi, handled without 0/0
    int m0 = static_cast<int>(std::lround(r.real() / kPi));
    cplx head;
    if (m0 >= 1 && m0 <= M) {
        const double mp = m0 * kPi;
        const cplx d = r - mp;
        // sin(r) / (mp - r) = (-1)^(m0+1) sinc(d)
        const double sgn = (m0 % 2 == 1) ? 1.0 : -1.0;
        head = sgn * sinc(d) * (mp * mp) / (r * (mp + r));
    } else {
        m0 = 0;
        head = sinc(r);
    }
    cplx prod = 1.0;
    for (int m = 1; m <= M; ++m) {
        if (m == m0) continue;
        const double mm = m * m * kPi * kPi;
        prod *= mm / (mm - l);
    }
    return head * prod;
}

}  // namespace

GapContour gap_contour(const HillSpectrum& spec, int n, GapSide side) {
    check_index(spec, n, "gap_contour");
    return GapContour{n, spec.tau[n], spec.gamma[n], side, spec.lambda_minus[n], spec.lambda_plus[n]};
}

double standard_root_real(const HillSpectrum& spec, int n, double l) {
    const double lm = spec.lambda_minus[n], lp = spec.lambda_plus[n];
    if (spec.gamma[n] == 0.0) return spec.tau[n] - l;
    if (l > lm && l < lp) throw std::invalid_argument("standard_root_real: lambda inside gap " + std::to_string(n));
    const double v = std::sqrt((l - lm) * (l - lp));
    return l <= lm ? v : -v;
}

cplx standard_root(const HillSpectrum& spec, int n, cplx l, std::optional<GapSide> side) {
    check_index(spec, n, "standard_root");
    const double tau = spec.tau[n], g = spec.gamma[n];
    if (side) {
        if (g == 0.0) return tau - l;
        const double t = 2.0 * (l.real() - tau) / g;
        const double s = 0.5 * g * std::sqrt(std::max(0.0, 1.0 - t * t));
        return *side == GapSide::plus ? -kI * s : kI * s;
    }
    if (g == 0.0) return tau - l;
    if (l.imag() == 0.0) return standard_root_real(spec, n, l.real());
    const cplx d = tau - l;
    const cplx w = g / (2.0 * d);
    return d * std::sqrt(1.0 - w * w);
}

cplx canonical_root(const HillSpectrum& spec, cplx l, int M) {
    M = effective_M(spec, M);
    cplx prod = 1.0;
    for (int m = 1; m <= M; ++m) prod *= standard_root(spec, m, l) / (m * m * kPi * kPi);
    return -2.0 * kI * std::sqrt(l - spec.lambda_plus[0]) * prod * tail_factor(l, M);
}

cplx delta_dot_over_root(const HillSpectrum& spec, cplx l, int M) {
    cplx prod = 1.0;
    for (int m : open_upto(spec, M)) prod *= (spec.lambda_dot[m] - l) / standard_root(spec, m, l);
    return prod / (2.0 * kI * std::sqrt(l - spec.lambda_plus[0]));
}

double gap_acosh(const Potential& q, int n, double l, double tol) {
    const auto v = discriminant(q, l, tol);
    const double D = ((n % 2 == 0) ? 0.5 : -0.5) * v.delta.real();
    if (D < 1.0 - 1e-12)
        throw std::runtime_error("floquet_F_on_gap: (-1)^n delta/2 = " + std::to_string(D) + " < 1 inside gap " +
                                 std::to_string(n));
    const double x = std::max(0.0, v.excess.real()) / (D + 1.0);
    return std::log1p(x + std::sqrt(x * (x + 2.0)));
}

double floquet_F_on_gap(const Potential& q, const HillSpectrum& spec, int n, double t, GapSide side, double tol) {
    check_index(spec, n, "floquet_F_on_gap");
    if (!(spec.gamma[n] > 0.0)) throw std::invalid_argument("floquet_F_on_gap: gap is closed");
    if (t < -1.0 || t > 1.0) throw std::invalid_argument("floquet_F_on_gap: t outside [-1,1]");
    if (t == -1.0 || t == 1.0) return 0.0;
    // the Potential is evaluated with its own mean, the spectrum is shifted to match
    const double A = gap_acosh(q, n, spec.tau[n] + 0.5 * t * spec.gamma[n], tol);
    return side == GapSide::minus ? -A : A;
}

double chi(const HillSpectrum& spec, int n, double l, int M) {
    double prod = n * kPi / std::sqrt(l - spec.lambda_plus[0]);
    for (int m : open_upto(spec, M)) {
        if (m == n) continue;
        prod *= (spec.lambda_dot[m] - l) / standard_root_real(spec, m, l);
    }
    return prod;
}

double loop_integral_delta_dot(const HillSpectrum& spec, int n, int M, int nodes) {
    check_index(spec, n, "loop_integral_delta_dot");
    if (spec.gamma[n] == 0.0) return 0.0;
    const ChebyshevRule R(nodes);
    double s = 0.0;
    for (double t : R.t) {
        const double l = spec.tau[n] + 0.5 * t * spec.gamma[n];
        s += (spec.lambda_dot[n] - l) * chi(spec, n, l, M);
    }
    // (1/2pi) (2/i) (1/2i) / (n pi) times the Chebyshev sum
    return -s * R.weight / (2.0 * kPi * n * kPi);
}

cplx floquet_F_reconstruct(const HillSpectrum& spec, int n, int M, int nodes) {
    check_index(spec, n, "floquet_F_reconstruct");
    const auto open = open_upto(spec, M);
    const double l0 = spec.lambda_plus[0];
    // segment endpoints: lambda_0^+, then both edges of each open gap below n, then lambda_n^+
    struct Seg {
        double a, b;
        int ga, gb;  // open gap whose edge is a / b (0 = lambda_0, -1 = regular)
    };
    std::vector<Seg> segs;
    double a = l0;
    int ga = 0;
    for (int m : open) {
        if (m >= n) break;
        segs.push_back({a, spec.lambda_minus[m], ga, m});
        a = spec.lambda_plus[m];
        ga = m;
    }
    const bool end_open = spec.gamma[n] > 0.0;
    segs.push_back({a, end_open ? spec.lambda_minus[n] : spec.tau[n], ga, end_open ? n : -1});
    // gap n itself contributes nothing (F_n vanishes at both edges)

    auto integrand = [&](const Seg& s, double th) {
        const double L = s.b - s.a;
        const double da = L * std::pow(std::sin(0.5 * th), 2);
        const double db = L * std::pow(std::cos(0.5 * th), 2);
        const double l = th < 0.5 * kPi ? s.a + da : s.b - db;
        const double jac = 0.5 * L * std::sin(th);
        const double dl0 = s.ga == 0 ? da : l - l0;
        double prod = 1.0 / std::sqrt(dl0);
        for (int m : open) {
            double sm;
            if (m == s.ga) sm = -std::sqrt(da * (da + spec.gamma[m]));
            else if (m == s.gb) sm = std::sqrt(db * (db + spec.gamma[m]));
            else sm = standard_root_real(spec, m, l);
            prod *= (spec.lambda_dot[m] - l) / sm;
        }
        return prod * jac;
    };
    double total = 0.0;
    for (const auto& s : segs) {
        if (!(s.b > s.a)) continue;
        auto f = [&](double th) { return integrand(s, th); };
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, kPi, 12, 1e-13);
    }
    (void)nodes;
    return cplx(0.0, -0.5 * total);
}

// ---------------------------------------------------------------------------
// psi_n

namespace {

struct PsiKernel {
    const HillSpectrum& spec;
    const std::vector<int>& open;
    const std::vector<double>& sigma;
    int n;

    double sroot(int m, double l) const {
        return spec.gamma[m] > 0.0 ? standard_root_real(spec, m, l) : spec.tau[m] - l;
    }

    /// kernel at gap k without the (sigma_k - lambda) factor (k != n), or the full k = n kernel
    double base(int k, double l) const {
        double p = 1.0 / std::sqrt(l - spec.lambda_plus[0]);
        if (k != n) p /= sroot(n, l);
        for (int m : open) {
            if (m == n || m == k) continue;
            p *= (sigma[m] - l) / sroot(m, l);
        }
        return p;
    }
    double kernel(int k, double l) const { return k == n ? base(k, l) : (sigma[k] - l) * base(k, l); }
};

}  // namespace

double psi_gap_kernel(const HillSpectrum& spec, const PsiFunction& psi, int k, double l) {
    const auto open = open_upto(spec, psi.M);
    return PsiKernel{spec, open, psi.sigma, psi.n}.kernel(k, l);
}

double psi_gap_integral(const HillSpectrum& spec, const PsiFunction& psi, int k, int nodes,
                        const std::vector<double>& w) {
    check_index(spec, k, "psi_gap_integral");
    const auto open = open_upto(spec, psi.M);
    PsiKernel K{spec, open, psi.sigma, psi.n};
    const int n = psi.n;
    if (spec.gamma[k] == 0.0) {
        if (k != n) return 0.0;
        const double wv = w.empty() ? 1.0 : w.front();
        return psi.rho * n * kPi * K.kernel(n, spec.tau[n]) * wv;
    }
    const ChebyshevRule R(nodes);
    if (!w.empty() && static_cast<int>(w.size()) != nodes)
        throw std::invalid_argument("psi_gap_integral: weight size mismatch");
    double s = 0.0;
    for (int j = 0; j < nodes; ++j) {
        const double l = spec.tau[k] + 0.5 * R.t[j] * spec.gamma[k];
        s += (w.empty() ? 1.0 : w[j]) * K.kernel(k, l);
    }
    return psi.rho * n * R.weight * s;
}

PsiFunction psi_solve(const HillSpectrum& spec, int n, int M, double tol, int nodes) {
    check_index(spec, n, "psi_solve");
    if (M < n) throw std::invalid_argument("psi_solve: M must be >= n");
    M = effective_M(spec, M);
    const auto open = open_upto(spec, M);

    PsiFunction psi;
    psi.n = n;
    psi.M = M;
    psi.nodes = nodes;
    psi.sigma.assign(M + 1, 0.0);
    for (int k = 1; k <= M; ++k) psi.sigma[k] = spec.tau[k];
    psi.sigma[n] = spec.lambda_dot[n];
    psi.residuals.assign(M + 1, 0.0);

    std::vector<int> U;
    for (int k : open)
        if (k != n) U.push_back(k);
    const ChebyshevRule R(nodes);
    const int u = static_cast<int>(U.size());
    PsiKernel K{spec, open, psi.sigma, n};

    auto eval = [&](Eigen::VectorXd& r, Eigen::MatrixXd* J) {
        r.setZero(u);
        if (J) J->setZero(u, u);
        for (int a = 0; a < u; ++a) {
            const int k = U[a];
            for (int j = 0; j < nodes; ++j) {
                const double l = spec.tau[k] + 0.5 * R.t[j] * spec.gamma[k];
                const double b = K.base(k, l);
                const double ker = (psi.sigma[k] - l) * b;
                r[a] += ker;
                if (J) {
                    (*J)(a, a) += b;
                    for (int c = 0; c < u; ++c)
                        if (c != a) (*J)(a, c) += ker / (psi.sigma[U[c]] - l);
                }
            }
            r[a] *= n * R.weight;
            if (J) J->row(a) *= n * R.weight;
        }
    };

    Eigen::VectorXd r;
    Eigen::MatrixXd J;
    int it = 0;
    if (u > 0) {
        eval(r, &J);
        while (r.lpNorm<Eigen::Infinity>() > tol) {
            if (++it > 50)
                throw std::runtime_error("psi_solve: Newton did not converge for n=" + std::to_string(n) +
                                         ", max residual " + std::to_string(r.lpNorm<Eigen::Infinity>()));
            const Eigen::VectorXd dx = J.fullPivLu().solve(r);
            for (int a = 0; a < u; ++a) psi.sigma[U[a]] -= dx[a];
            eval(r, &J);
            if (dx.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, spec.tau[U.back()])) break;
        }
    }
    psi.iterations = it;

    // normalization from the k = n condition
    psi.rho = 1.0;
    const double In = psi_gap_integral(spec, psi, n, nodes);
    psi.rho = 1.0 / In;
    psi.prefactor = 2.0 * psi.rho / (n * kPi);
    double mx = 0.0;
    for (int a = 0; a < u; ++a) {
        psi.residuals[U[a]] = psi.rho * r[a];
        mx = std::max(mx, std::abs(psi.residuals[U[a]]));
    }
    psi.max_residual = mx;
    return psi;
}

}  // namespace kdvlab
