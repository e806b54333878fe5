#include "kdvlab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "kdvlab/hill.hpp"

namespace kdvlab {

namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

bool pow2(int M) { return M >= 8 && (M & (M - 1)) == 0; }

/// Half-spectrum workspace: modes 0..Kc with Kc = M/3, products on a 2M grid.
class Spectral {
public:
    Spectral(int M, Equation eq) : M_(M), P_(2 * M), Kc_(M / 3), eq_(eq) {
        spec_ = fftw_alloc_complex(P_ / 2 + 1);
        phys_ = fftw_alloc_real(P_);
        std::lock_guard lk(plan_mutex());
        c2r_ = fftw_plan_dft_c2r_1d(P_, spec_, phys_, FFTW_ESTIMATE);
        r2c_ = fftw_plan_dft_r2c_1d(P_, phys_, spec_, FFTW_ESTIMATE);
    }
    ~Spectral() {
        std::lock_guard lk(plan_mutex());
        fftw_destroy_plan(c2r_);
        fftw_destroy_plan(r2c_);
        fftw_free(spec_);
        fftw_free(phys_);
    }
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    int Kc() const { return Kc_; }
    double k(int n) const { return 2.0 * kPi * n; }

    /// linear symbol: u_hat_n' = i w_n u_hat_n
    double omega_lin(int n) const {
        const double kk = k(n);
        return eq_ == Equation::kdv2 ? std::pow(kk, 5) : kk * kk * kk;
    }

    /// physical values of (ik)^d u on the padded grid
    void to_phys(const std::vector<cplx>& h, int d, std::vector<double>& out) {
        for (int n = 0; n <= P_ / 2; ++n) {
            cplx v = 0.0;
            if (n <= Kc_) {
                v = h[n];
                const cplx ik(0.0, k(n));
                for (int j = 0; j < d; ++j) v *= ik;
            }
            spec_[n][0] = v.real();
            spec_[n][1] = v.imag();
        }
        fftw_execute(c2r_);
        out.assign(phys_, phys_ + P_);
    }

    /// truncated half spectrum of the physical array f (normalized)
    void to_spec(const std::vector<double>& f, std::vector<cplx>& h) {
        std::copy(f.begin(), f.end(), phys_);
        fftw_execute(r2c_);
        h.assign(Kc_ + 1, 0.0);
        for (int n = 0; n <= Kc_; ++n) h[n] = cplx(spec_[n][0], spec_[n][1]) / double(P_);
    }

    void nonlinear(const std::vector<cplx>& h, std::vector<cplx>& out) {
        if (eq_ == Equation::airy) {
            out.assign(Kc_ + 1, 0.0);
            return;
        }
        to_phys(h, 0, u_);
        f_.resize(P_);
        if (eq_ == Equation::kdv) {
            for (int j = 0; j < P_; ++j) f_[j] = 3.0 * u_[j] * u_[j];
        } else {
            to_phys(h, 1, ux_);
            to_phys(h, 2, uxx_);
            for (int j = 0; j < P_; ++j) {
                const double u = u_[j];
                f_[j] = -10.0 * u * uxx_[j] - 5.0 * ux_[j] * ux_[j] + 10.0 * u * u * u;
            }
        }
        to_spec(f_, out);
        for (int n = 0; n <= Kc_; ++n) out[n] *= cplx(0.0, k(n));
        out[0] = 0.0;
    }

    /// sup norms of u, u_x, u_xx on the padded grid
    void sup_norms(const std::vector<cplx>& h, double& s0, double& s1, double& s2) {
        auto sup = [](const std::vector<double>& v) {
            double m = 0.0;
            for (double x : v) m = std::max(m, std::abs(x));
            return m;
        };
        to_phys(h, 0, u_);
        s0 = sup(u_);
        to_phys(h, 1, ux_);
        s1 = sup(ux_);
        to_phys(h, 2, uxx_);
        s2 = sup(uxx_);
    }

private:
    int M_, P_, Kc_;
    Equation eq_;
    fftw_complex* spec_ = nullptr;
    double* phys_ = nullptr;
    fftw_plan c2r_ = nullptr, r2c_ = nullptr;
    std::vector<double> u_, ux_, uxx_, f_;
};

std::vector<cplx> half_from_grid(const GridState& g, int Kc) {
    std::vector<cplx> h(Kc + 1, 0.0);
    for (int n = 0; n <= Kc; ++n) h[n] = g.mode(n);
    h[0] = cplx(h[0].real(), 0.0);
    return h;
}

GridState grid_from_half(const std::vector<cplx>& h, int M, double t) {
    GridState g;
    g.M = M;
    g.t = t;
    g.u_hat.assign(M, 0.0);
    g.u_hat[0] = h[0];
    for (int n = 1; n < static_cast<int>(h.size()); ++n) {
        g.u_hat[n] = h[n];
        g.u_hat[M - n] = std::conj(h[n]);
    }
    return g;
}

bool finite(const std::vector<cplx>& h) {
    for (const auto& v : h)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

double stiffness_of(Spectral& S, const std::vector<cplx>& h, Equation eq) {
    if (eq == Equation::airy) return 0.0;
    double s0, s1, s2;
    S.sup_norms(h, s0, s1, s2);
    // occupied band, not the retained one: the linear symbol is exact
    double mx = 0.0;
    for (const auto& v : h) mx = std::max(mx, std::abs(v));
    int top = 1;
    for (int n = 1; n < static_cast<int>(h.size()); ++n)
        if (std::abs(h[n]) > 1e-8 * mx) top = n;
    const double k = S.k(top);
    if (eq == Equation::kdv) return 6.0 * s0 * k + 6.0 * s1;
    return 10.0 * s0 * k * k * k + 10.0 * s1 * k * k + (10.0 * s2 + 30.0 * s0 * s0) * k;
}

/// ETDRK4 weights for z = L h. Small |z| by the contour mean (the direct
/// formulas cancel catastrophically there).
void etd_coefficients(cplx z, double h, cplx& Q, cplx& f1, cplx& f2, cplx& f3) {
    auto direct = [h](cplx r, cplx& q, cplx& a, cplx& b, cplx& c) {
        const cplx er = std::exp(r), er2 = std::exp(0.5 * r), r3 = r * r * r;
        q = h * (er2 - 1.0) / r;
        a = h * (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
        b = h * (2.0 + r + er * (r - 2.0)) / r3;
        c = h * (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
    };
    if (std::abs(z) >= 1.0) {
        direct(z, Q, f1, f2, f3);
        return;
    }
    constexpr int P = 32;
    Q = f1 = f2 = f3 = 0.0;
    for (int j = 0; j < P; ++j) {
        cplx q, a, b, c;
        direct(z + std::polar(1.0, kPi * (j + 0.5) / P * 2.0), q, a, b, c);
        Q += q;
        f1 += a;
        f2 += b;
        f3 += c;
    }
    Q /= double(P);
    f1 /= double(P);
    f2 /= double(P);
    f3 /= double(P);
}

int resolve_M(const EvolveOptions& opt) {
    const int M = opt.M > 0 ? opt.M : (opt.eq == Equation::kdv2 ? 128 : 256);
    if (!pow2(M)) throw std::invalid_argument("evolve: M must be a power of two >= 8");
    return M;
}

}  // namespace

cplx GridState::mode(int n) const {
    if (n >= M / 2 || n <= -M / 2) return 0.0;
    return u_hat[n >= 0 ? n : M + n];
}

double GridState::reality_defect() const {
    double d = std::abs(u_hat[0].imag());
    for (int n = 1; n < M / 2; ++n) d = std::max(d, std::abs(u_hat[M - n] - std::conj(u_hat[n])));
    return d;
}

Potential GridState::to_potential(double floor) const {
    double mx = 0.0;
    for (int n = 1; n < M / 2; ++n) mx = std::max(mx, std::abs(u_hat[n]));
    std::vector<std::pair<int, cplx>> pairs;
    for (int n = 1; n < M / 2; ++n)
        if (std::abs(u_hat[n]) > floor * mx) pairs.emplace_back(n, u_hat[n]);
    return Potential::make(pairs, u_hat[0].real());
}

double GridState::sobolev_norm(double s) const {
    double acc = 0.0;
    for (int i = 0; i < M; ++i) {
        const int n = i < M / 2 ? i : i - M;
        acc += std::pow(1.0 + std::abs(n), 2.0 * s) * std::norm(u_hat[i]);
    }
    return std::sqrt(acc);
}

GridState grid_from_potential(const Potential& q, int M) {
    if (!pow2(M)) throw std::invalid_argument("grid_from_potential: M must be a power of two >= 8");
    if (q.max_mode() > M / 3) throw std::invalid_argument("grid_from_potential: potential exceeds the retained band");
    GridState g;
    g.M = M;
    g.u_hat.assign(M, 0.0);
    g.u_hat[0] = q.mean();
    for (const auto& [n, u] : q.positive()) {
        g.u_hat[n] = u;
        g.u_hat[M - n] = std::conj(u);
    }
    return g;
}

double default_dt(Equation eq, int M) {
    switch (eq) {
        case Equation::airy:
            return 1e-3;
        case Equation::kdv:
            return 1e-5 * std::min(1.0, std::pow(256.0 / M, 3));
        case Equation::kdv2:
            return 2e-7 * std::min(1.0, std::pow(128.0 / M, 5));
    }
    return 1e-5;
}

double stiffness(const GridState& u, Equation eq) {
    Spectral S(u.M, eq);
    return stiffness_of(S, half_from_grid(u, S.Kc()), eq);
}

GridState airy_exact(const Potential& q, double t, int M) {
    GridState g = grid_from_potential(q, M);
    Spectral S(M, Equation::airy);
    auto h = half_from_grid(g, S.Kc());
    for (int n = 1; n <= S.Kc(); ++n) h[n] *= std::polar(1.0, S.omega_lin(n) * t);
    return grid_from_half(h, M, t);
}

Trajectory evolve(const Potential& q, double T, const EvolveOptions& opt) {
    return evolve(grid_from_potential(q, resolve_M(opt)), T, opt);
}

Trajectory evolve(const GridState& u0, double T, const EvolveOptions& opt) {
    const int M = u0.M;
    if (opt.M > 0 && opt.M != M) throw std::invalid_argument("evolve: grid size differs from options");
    if (!(T >= 0.0)) throw std::invalid_argument("evolve: T must be >= 0");
    if (opt.stride < 1) throw std::invalid_argument("evolve: stride must be >= 1");
    const double dt = opt.dt > 0.0 ? opt.dt : default_dt(opt.eq, M);
    Spectral S(M, opt.eq);
    Trajectory tr;
    tr.eq = opt.eq;
    tr.dt = dt;
    auto h = half_from_grid(u0, S.Kc());
    const double t0 = u0.t;
    tr.samples.push_back(grid_from_half(h, M, t0));
    if (T == 0.0) return tr;

    if (opt.eq == Equation::airy) {
        const auto h0 = h;
        const long steps = std::max(1L, static_cast<long>(std::ceil(T / dt - 1e-9)));
        for (long s = 1; s <= steps; ++s) {
            if (s % opt.stride != 0 && s != steps) continue;
            const double t = s == steps ? T : s * dt;
            for (int n = 1; n <= S.Kc(); ++n) h[n] = h0[n] * std::polar(1.0, S.omega_lin(n) * t);
            tr.samples.push_back(grid_from_half(h, M, t0 + t));
        }
        return tr;
    }

    const double stiff = stiffness_of(S, h, opt.eq);
    if (dt * stiff > opt.stability_limit)
        throw std::invalid_argument("evolve: dt=" + std::to_string(dt) + " exceeds the stability estimate (dt*rho=" +
                                    std::to_string(dt * stiff) + ")");

    const int K = S.Kc();
    std::vector<cplx> k1, k2, k3, k4, tmp(K + 1), a(K + 1), b(K + 1), E(K + 1), E2(K + 1);
    std::vector<cplx> Q(K + 1), f1(K + 1), f2(K + 1), f3(K + 1);
    auto phases = [&](double h_) {
        for (int n = 0; n <= K; ++n) {
            E[n] = std::polar(1.0, S.omega_lin(n) * h_);
            E2[n] = std::polar(1.0, S.omega_lin(n) * 0.5 * h_);
            if (opt.scheme == Scheme::etdrk4) etd_coefficients(cplx(0.0, S.omega_lin(n) * h_), h_, Q[n], f1[n], f2[n], f3[n]);
        }
    };
    auto step_if = [&](double h_) {
        S.nonlinear(h, k1);
        for (int n = 0; n <= K; ++n) tmp[n] = E2[n] * (h[n] + 0.5 * h_ * k1[n]);
        S.nonlinear(tmp, k2);
        for (int n = 0; n <= K; ++n) tmp[n] = E2[n] * h[n] + 0.5 * h_ * k2[n];
        S.nonlinear(tmp, k3);
        for (int n = 0; n <= K; ++n) tmp[n] = E[n] * h[n] + E2[n] * h_ * k3[n];
        S.nonlinear(tmp, k4);
        for (int n = 0; n <= K; ++n)
            h[n] = E[n] * h[n] + h_ / 6.0 * (E[n] * k1[n] + 2.0 * E2[n] * (k2[n] + k3[n]) + k4[n]);
    };
    auto step_etd = [&](double) {
        S.nonlinear(h, k1);
        for (int n = 0; n <= K; ++n) a[n] = E2[n] * h[n] + Q[n] * k1[n];
        S.nonlinear(a, k2);
        for (int n = 0; n <= K; ++n) b[n] = E2[n] * h[n] + Q[n] * k2[n];
        S.nonlinear(b, k3);
        for (int n = 0; n <= K; ++n) tmp[n] = E2[n] * a[n] + Q[n] * (2.0 * k3[n] - k1[n]);
        S.nonlinear(tmp, k4);
        for (int n = 0; n <= K; ++n)
            h[n] = E[n] * h[n] + f1[n] * k1[n] + 2.0 * f2[n] * (k2[n] + k3[n]) + f3[n] * k4[n];
    };
    auto step = [&](double h_) {
        if (opt.scheme == Scheme::etdrk4)
            step_etd(h_);
        else
            step_if(h_);
    };

    const long full = static_cast<long>(std::floor(T / dt + 1e-9));
    const double rest = T - full * dt;
    const bool extra = rest > 1e-12 * dt;
    const long steps = full + (extra ? 1 : 0);
    phases(dt);
    GridState last = tr.samples.back();
    for (long s = 1; s <= steps; ++s) {
        const bool short_step = extra && s == steps;
        if (short_step) phases(rest);
        step(short_step ? rest : dt);
        if (!finite(h)) throw BlowupError("evolve: non-finite state at step " + std::to_string(s), last);
        if (s % opt.stride == 0 || s == steps) {
            const double t = s == steps ? T : s * dt;
            last = grid_from_half(h, M, t0 + t);
            tr.samples.push_back(last);
        }
    }
    return tr;
}

FrequencyFit measure_mode_frequency(const Trajectory& tr, int n, double t0, double t1) {
    if (n < 1) throw std::invalid_argument("measure_mode_frequency: n must be >= 1");
    std::vector<double> ts, ph;
    for (const auto& g : tr.samples) {
        if (g.t < t0 || (t1 >= 0.0 && g.t > t1)) continue;
        const cplx v = g.mode(n);
        if (std::abs(v) == 0.0) throw std::runtime_error("measure_mode_frequency: mode vanishes in window");
        ts.push_back(g.t);
        ph.push_back(std::arg(v));
    }
    if (ts.size() < 3) throw std::invalid_argument("measure_mode_frequency: fewer than 3 samples in window");
    const double kk = 2.0 * kPi * n;
    const double wlin = tr.eq == Equation::kdv2 ? std::pow(kk, 5) : kk * kk * kk;
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (wlin * (ts[i] - ts[i - 1]) > 0.9 * kPi)
            throw std::runtime_error("measure_mode_frequency: sampling too sparse for phase unwrapping");
    // unwrap relative to the linear prediction
    for (std::size_t i = 1; i < ph.size(); ++i) {
        const double pred = ph[i - 1] + wlin * (ts[i] - ts[i - 1]);
        ph[i] += 2.0 * kPi * std::round((pred - ph[i]) / (2.0 * kPi));
    }
    const double N = static_cast<double>(ts.size());
    double st = 0.0, sp = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sp += ph[i];
    }
    const double tm = st / N, pm = sp / N;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        num += (ts[i] - tm) * (ph[i] - pm);
        den += (ts[i] - tm) * (ts[i] - tm);
    }
    FrequencyFit f;
    f.omega = num / den;
    double r = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double e = ph[i] - (pm + f.omega * (ts[i] - tm));
        r += e * e;
    }
    f.residual = std::sqrt(r / N);
    return f;
}

DriftReport isospectral_drift(const Trajectory& tr, const std::vector<int>& ns, int every, double tol) {
    if (ns.empty() || every < 1) throw std::invalid_argument("isospectral_drift: bad arguments");
    const int N = *std::max_element(ns.begin(), ns.end());
    SpectrumOptions so;
    so.tol = tol;
    so.dirichlet = false;
    DriftReport rep;
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        if (i % every != 0 && i + 1 != tr.samples.size()) continue;
        try {
            const auto sp = periodic_spectrum(tr.samples[i].to_potential(), N, so);
            std::vector<double> g;
            for (int n : ns) g.push_back(sp.gamma[n]);
            rep.times.push_back(tr.samples[i].t);
            rep.gamma.push_back(std::move(g));
        } catch (const std::exception&) {
            rep.partial = true;
        }
    }
    if (rep.gamma.empty()) throw std::runtime_error("isospectral_drift: no sample could be resolved");
    for (const auto& g : rep.gamma)
        for (std::size_t j = 0; j < g.size(); ++j)
            rep.max_drift = std::max(rep.max_drift, std::abs(g[j] - rep.gamma.front()[j]));
    return rep;
}

std::vector<SmoothingRow> one_smoothing_gap(const Potential& q, const std::vector<double>& times,
                                            const EvolveOptions& optin) {
    EvolveOptions opt = optin;
    opt.eq = Equation::kdv;
    const int M = resolve_M(opt);
    GridState u = grid_from_potential(q, M);
    std::vector<SmoothingRow> rows;
    double prev = 0.0;
    for (double t : times) {
        if (t < prev) throw std::invalid_argument("one_smoothing_gap: times must ascend from 0");
        if (t > prev) {
            auto tr = evolve(u, t - prev, opt);
            u = tr.samples.back();
        }
        u.t = t;
        prev = t;
        const GridState a = airy_exact(q, t, M);
        GridState d = u;
        for (int i = 0; i < M; ++i) d.u_hat[i] -= a.u_hat[i];
        const double gap = d.sobolev_norm(1.0);
        rows.push_back({t, gap, gap / (1.0 + std::abs(t))});
    }
    return rows;
}

}  // namespace kdvlab
