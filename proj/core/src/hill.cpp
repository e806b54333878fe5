#include "kdvlab/hill.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

namespace kdvlab {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kPi = std::numbers::pi;

/// Flattened cosine/sine table of q for the right-hand side.
struct QEval {
    double mean = 0.0;
    std::vector<int> n;
    std::vector<double> re, im;  // q = mean + 2 sum (re cos - im sin)
    explicit QEval(const Potential& q) : mean(q.mean()) {
        for (const auto& [m, u] : q.positive()) {
            n.push_back(m);
            re.push_back(2.0 * u.real());
            im.push_back(2.0 * u.imag());
        }
    }
    double operator()(double x) const {
        double s = mean;
        for (std::size_t j = 0; j < n.size(); ++j) {
            const double a = 2.0 * kPi * n[j] * x;
            s += re[j] * std::cos(a) - im[j] * std::sin(a);
        }
        return s;
    }
};

template <class T>
using State = std::array<T, 8>;

template <class T>
struct HillRhs {
    const QEval* q;
    T lam;
    void operator()(const State<T>& s, State<T>& d, double x) const {
        const T a = T((*q)(x)) - lam;
        d[0] = s[1];
        d[1] = a * s[0];
        d[2] = s[3];
        d[3] = a * s[2];
        d[4] = s[5];
        d[5] = a * s[4] - s[0];
        d[6] = s[7];
        d[7] = a * s[6] - s[2];
    }
};

template <class T>
DiscriminantValue integrate(const Potential& q, T lam, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("discriminant: tol must be positive");
    QEval qe(q);
    State<T> s{T(1), T(0), T(0), T(1), T(0), T(0), T(0), T(0)};
    using stepper_t = odeint::runge_kutta_fehlberg78<State<T>, double, State<T>, double>;
    auto stepper = odeint::make_controlled(tol, tol, stepper_t());
    const double freq = std::sqrt(std::abs(cplx(lam)) + 1.0);
    const double dt0 = 0.05 / freq;
    try {
        odeint::integrate_adaptive(stepper, HillRhs<T>{&qe, lam}, s, 0.0, 1.0, dt0);
    } catch (const std::exception& e) {
        throw IntegrationError(std::string("discriminant: integration failed: ") + e.what(), cplx(lam));
    }
    for (const auto& v : s)
        if (!std::isfinite(std::abs(cplx(v)))) throw IntegrationError("discriminant: non-finite state", cplx(lam));

    DiscriminantValue r;
    const cplx y1 = s[0], y1p = s[1], y2 = s[2], y2p = s[3];
    r.y1 = y1;
    r.y1p = y1p;
    r.y2p = y2p;
    r.delta = y1 + y2p;
    r.delta_dot = cplx(s[4]) + cplx(s[7]);
    r.y2_at_1 = y2;
    r.wronskian_residual = std::abs(y1 * y2p - y1p * y2 - 1.0);
    const cplx a = 0.5 * (y1 - y2p);
    r.excess = a * a + y1p * y2;
    return r;
}

double real_tol_width(double a, double b) {
    return 4.0 * std::numeric_limits<double>::epsilon() * std::max({std::abs(a), std::abs(b), 1.0});
}

/// Bracketed root of f on [a, b] where f(a), f(b) have opposite signs.
template <class F>
double solve_bracketed(F&& f, double a, double b, double fa, double fb) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    std::uintmax_t it = 200;
    auto tol = [](double x, double y) { return std::abs(y - x) <= real_tol_width(x, y); };
    auto res = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, it);
    return 0.5 * (res.first + res.second);
}

struct Solver {
    const Potential& q;  // zero mean
    SpectrumOptions opt;
    double W;

    DiscriminantValue at(double lam) const { return integrate<double>(q, lam, opt.tol); }

    double critical(int n) const {
        const double c = n * n * kPi * kPi;
        auto f = [&](double l) { return at(l).delta_dot.real(); };
        double h = 3.0 * n + W;
        for (int attempt = 0; attempt < 2; ++attempt, h *= 2.0) {
            // Chebyshev-spaced scan, ordered by lambda
            const int J = 14;
            std::vector<double> xs(J + 2), fs(J + 2);
            xs[0] = c - h;
            xs[J + 1] = c + h;
            for (int j = 0; j < J; ++j) xs[J - j] = c + h * std::cos(kPi * (j + 0.5) / J);
            for (int j = 0; j < J + 2; ++j) fs[j] = f(xs[j]);
            int best = -1;
            double bestd = 1e300;
            for (int j = 0; j + 1 < J + 2; ++j) {
                if ((fs[j] <= 0.0) != (fs[j + 1] <= 0.0)) {
                    const double d = std::abs(0.5 * (xs[j] + xs[j + 1]) - c);
                    if (d < bestd) {
                        bestd = d;
                        best = j;
                    }
                }
            }
            if (best >= 0) return solve_bracketed(f, xs[best], xs[best + 1], fs[best], fs[best + 1]);
        }
        throw BracketError("periodic_spectrum: critical point not isolated for n=" + std::to_string(n), n);
    }

    /// root of g on the side dir = +1 (above ld) or -1 (below ld)
    double edge(int n, double ld, double gd, double half, int dir) const {
        auto g = [&](double l) { return at(l).excess.real(); };
        double a = ld, ga = gd;
        double s = std::max(1.2 * half, 1e-12 * std::max(1.0, std::abs(ld)));
        double b = ld + dir * s, gb = g(b);
        int k = 0;
        while (gb > 0.0) {
            if (++k > 60) throw BracketError("periodic_spectrum: gap edge not bracketed for n=" + std::to_string(n), n);
            a = b;
            ga = gb;
            s *= 2.0;
            b = ld + dir * s;
            gb = g(b);
        }
        double r = dir > 0 ? solve_bracketed(g, a, b, ga, gb) : solve_bracketed(g, b, a, gb, ga);
        // Newton polish with g' = delta * delta_dot / 2
        const double lo = std::min(a, b), hi = std::max(a, b);
        for (int it = 0; it < 3; ++it) {
            const auto v = at(r);
            const double gv = v.excess.real();
            const double gp = 0.5 * (v.delta * v.delta_dot).real();
            if (gp == 0.0 || gv == 0.0) break;
            const double rn = r - gv / gp;
            if (!(rn >= lo && rn <= hi)) break;
            if (std::abs(at(rn).excess.real()) >= std::abs(gv)) break;
            r = rn;
        }
        return r;
    }

    double dirichlet(int n, double lm, double lp) const {
        auto f = [&](double l) { return at(l).y2_at_1.real(); };
        double w = 0.5;
        for (int attempt = 0; attempt < 4; ++attempt, w *= 2.0) {
            const double a = lm - w, b = lp + w;
            const double fa = f(a), fb = f(b);
            if ((fa <= 0.0) != (fb <= 0.0)) return solve_bracketed(f, a, b, fa, fb);
        }
        throw BracketError("periodic_spectrum: Dirichlet eigenvalue not isolated for n=" + std::to_string(n), n);
    }

    double ground(double hi) const {
        auto g = [&](double l) { return at(l).excess.real(); };
        const double lo = -q.sup_bound() - 1.0;
        double a = lo, ga = g(lo);
        if (!(ga > 0.0)) throw BracketError("periodic_spectrum: lambda_0 lower bracket invalid", 0);
        const int J = 24;
        for (int j = 1; j <= J; ++j) {
            const double b = lo + (hi - lo) * j / (J + 1.0);
            const double gb = g(b);
            if (gb < 0.0) return solve_bracketed(g, a, b, ga, gb);
            a = b;
            ga = gb;
        }
        throw BracketError("periodic_spectrum: lambda_0 not isolated", 0);
    }
};

}  // namespace

DiscriminantValue discriminant(const Potential& q, cplx lambda, double tol) {
    return integrate<cplx>(q, lambda, tol);
}

DiscriminantValue discriminant(const Potential& q, double lambda, double tol) {
    return integrate<double>(q, lambda, tol);
}

std::vector<int> HillSpectrum::open_gaps() const {
    std::vector<int> out;
    for (int n = 1; n <= N; ++n)
        if (gamma[n] > 0.0) out.push_back(n);
    return out;
}

HillSpectrum HillSpectrum::shifted(double c) const {
    HillSpectrum s = *this;
    s.mean += c;
    for (int n = 0; n <= N; ++n) {
        s.lambda_plus[n] += c;
        if (n >= 1) {
            s.lambda_minus[n] += c;
            s.mu[n] += c;
            s.lambda_dot[n] += c;
            s.tau[n] += c;
        }
    }
    return s;
}

HillSpectrum periodic_spectrum(const Potential& qin, int N, const SpectrumOptions& opt) {
    if (N < 1) throw std::invalid_argument("periodic_spectrum: N must be >= 1");
    if (!(opt.tol > 0.0)) throw std::invalid_argument("periodic_spectrum: tol must be positive");
    const Potential q = qin.zero_mean();
    Solver S{q, opt, 2.0 * q.sup_bound()};

    HillSpectrum sp;
    sp.N = N;
    sp.tol = opt.tol;
    sp.mean = 0.0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    sp.lambda_plus.assign(N + 1, nan);
    sp.lambda_minus.assign(N + 1, nan);
    sp.mu.assign(N + 1, nan);
    sp.lambda_dot.assign(N + 1, nan);
    sp.gamma.assign(N + 1, nan);
    sp.tau.assign(N + 1, nan);

    for (int n = 1; n <= N; ++n) {
        const double ld = S.critical(n);
        sp.lambda_dot[n] = ld;
        const double gd = S.at(ld).excess.real();
        const double gest = gd > 0.0 ? 4.0 * n * kPi * std::sqrt(gd) : 0.0;
        if (gest < opt.collapse) {
            sp.lambda_minus[n] = sp.lambda_plus[n] = sp.tau[n] = ld;
            sp.gamma[n] = 0.0;
        } else {
            const double lp = S.edge(n, ld, gd, 0.5 * gest, +1);
            const double lm = S.edge(n, ld, gd, 0.5 * gest, -1);
            const double gam = lp - lm;
            if (gam < opt.collapse) {
                sp.lambda_minus[n] = sp.lambda_plus[n] = sp.tau[n] = ld;
                sp.gamma[n] = 0.0;
            } else {
                sp.lambda_minus[n] = lm;
                sp.lambda_plus[n] = lp;
                sp.gamma[n] = gam;
                sp.tau[n] = 0.5 * (lp + lm);
            }
        }
        if (opt.dirichlet) sp.mu[n] = S.dirichlet(n, sp.lambda_minus[n], sp.lambda_plus[n]);
    }
    sp.lambda_plus[0] = S.ground(sp.lambda_minus[1]);

    double prev = sp.lambda_plus[0];
    for (int n = 1; n <= N; ++n) {
        if (!(sp.lambda_minus[n] > prev))
            throw BracketError("periodic_spectrum: ordering violated at n=" + std::to_string(n), n);
        prev = sp.lambda_plus[n];
    }
    return qin.mean() == 0.0 ? sp : sp.shifted(qin.mean());
}

}  // namespace kdvlab
