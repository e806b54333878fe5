#include "kdvlab/invariants.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "kdvlab/quadrature.hpp"
#include "parallel.hpp"

namespace kdvlab {

namespace {

constexpr double kPi = std::numbers::pi;

double action_sum(const HillSpectrum& spec, int n, int nodes) {
    const ChebyshevRule R(nodes);
    const double g = spec.gamma[n];
    const double tn = 2.0 * (spec.lambda_dot[n] - spec.tau[n]) / g;
    double s = 0.0;
    for (double t : R.t) {
        const double l = spec.tau[n] + 0.5 * t * g;
        s += (t - tn) * (t - tn) * chi(spec, n, l, spec.N);
    }
    return g * g / (8.0 * n * kPi) * (2.0 / nodes) * s;
}

}  // namespace

ActionEntry action(const HillSpectrum& spec, int n, int nodes) {
    if (n < 1 || n > spec.N) throw std::out_of_range("action: index outside spectrum");
    ActionEntry e;
    if (!(spec.gamma[n] > 0.0)) return e;
    e.I = action_sum(spec, n, nodes);
    e.error = std::abs(e.I - action_sum(spec, n, 2 * nodes));
    e.flagged = e.error > 1e-6 * std::max(e.I, 1e-12);
    return e;
}

ActionVector actions(const HillSpectrum& spec, int nodes) {
    ActionVector v;
    v.N = spec.N;
    v.I.assign(spec.N + 1, 0.0);
    v.error.assign(spec.N + 1, 0.0);
    v.flagged.assign(spec.N + 1, false);
    for (int n = 1; n <= spec.N; ++n) {
        const auto e = action(spec, n, nodes);
        v.I[n] = e.I;
        v.error[n] = e.error;
        v.flagged[n] = e.flagged;
    }
    return v;
}

std::vector<double> gap_acosh_samples(const Potential& q, const HillSpectrum& spec, int k, int nodes, double tol) {
    if (!spec.open(k)) return {};
    const ChebyshevRule R(nodes);
    std::vector<double> A(nodes);
    for (int j = 0; j < nodes; ++j) A[j] = gap_acosh(q, k, spec.tau[k] + 0.5 * R.t[j] * spec.gamma[k], tol);
    return A;
}

double omega_moment(const HillSpectrum& spec, const PsiFunction& psi, int k, const std::vector<double>& A, int m,
                    bool short_circuit) {
    if (m < 0) throw std::invalid_argument("omega_moment: negative order");
    if (!spec.open(k)) {
        if (m == 0) return 2.0 * kPi * psi_gap_integral(spec, psi, k, psi.nodes);
        return 0.0;
    }
    if (short_circuit && m % 2 == 1) return 0.0;
    const int N = static_cast<int>(A.size());
    std::vector<double> wp(N), wm(N);
    for (int j = 0; j < N; ++j) {
        wp[j] = std::pow(A[j], m);
        wm[j] = std::pow(-A[j], m);
    }
    if (short_circuit) return 2.0 * kPi * psi_gap_integral(spec, psi, k, N, wp);
    // each side carries half of the loop integral
    return kPi * (psi_gap_integral(spec, psi, k, N, wp) + psi_gap_integral(spec, psi, k, N, wm));
}

double r_moment(const HillSpectrum& spec, int n, const std::vector<double>& A, int m, bool short_circuit) {
    if (m < 1) throw std::invalid_argument("r_moment: order must be >= 1");
    if (!spec.open(n)) return 0.0;
    if (short_circuit && m % 2 == 0) return 0.0;
    const ChebyshevRule R(static_cast<int>(A.size()));
    double s = 0.0;
    for (int j = 0; j < R.size(); ++j) s += std::pow(A[j], m) * R.sqrt1m(j);
    s *= R.weight;  // int_{-1}^{1} A^m dt
    // lower side forward with F = -A, upper side backward with F = +A
    const double loop = 0.5 * spec.gamma[n] * (std::pow(-1.0, m) - 1.0) * s;
    return -loop / kPi;
}

MomentTable moments(const Potential& q, const HillSpectrum& spec, const std::vector<PsiFunction>& psis, int N, int K,
                    const MomentOptions& opt) {
    if (N < 1 || N > spec.N || K < 1 || K > spec.N)
        throw std::invalid_argument("moments: N and K must lie in [1, spectrum N]");
    if (static_cast<int>(psis.size()) <= N) throw std::invalid_argument("moments: missing psi functions");
    MomentTable mt;
    mt.N = N;
    mt.K = K;
    mt.nodes = opt.nodes;
    mt.gamma.assign(spec.gamma.begin(), spec.gamma.begin() + K + 1);

    std::vector<std::vector<double>> A(K + 1);
    detail::parallel_for(K, opt.jobs, [&](int i) { A[i + 1] = gap_acosh_samples(q, spec, i + 1, opt.nodes, opt.tol); });

    for (int m : opt.orders) mt.omega[m].assign(N + 1, std::vector<double>(K + 1, 0.0));
    detail::parallel_for(N, opt.jobs, [&](int i) {
        const int n = i + 1;
        for (int m : opt.orders)
            for (int k = 1; k <= K; ++k) {
                if (m == 0 && !spec.open(k)) {
                    mt.omega[m][n][k] = (k == n) ? 2.0 * kPi * psi_gap_integral(spec, psis[n], k, opt.nodes) : 0.0;
                    continue;
                }
                mt.omega[m][n][k] = omega_moment(spec, psis[n], k, A[k], m);
            }
    });
    for (int m : {1, 3, 5}) {
        auto& r = mt.R[m];
        r.assign(K + 1, 0.0);
        for (int n = 1; n <= K; ++n) r[n] = r_moment(spec, n, A[n], m);
    }
    return mt;
}

namespace {

constexpr double kTailSafety = 2.0;

/// Sum over open k <= K with the 1e-14 stop rule. The tail over k > K uses
/// |term_k| ~ C gamma_k^2 k^p / |n^2 - k^2| with gamma_k continued
/// geometrically from the last two open gaps and C fitted to the last open
/// k != n.
template <class Term>
double stop_rule_sum(const MomentTable& mt, int n, Term term, int p, double* tail, int* last) {
    double s = 0.0;
    int quiet = 0, k_last = 0;
    for (int k = 1; k <= mt.K; ++k) {
        const double t = term(k);
        if (t == 0.0) continue;  // closed gap
        s += t;
        k_last = k;
        if (std::abs(t) < 1e-14 * std::abs(s)) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
    }
    if (last) *last = k_last;
    if (!tail) return s;
    *tail = 0.0;
    if (quiet >= 3) {
        *tail = 3e-14 * std::abs(s);
        return s;
    }
    std::vector<int> open;
    for (int k = 1; k <= mt.K; ++k)
        if (mt.gamma[k] > 0.0) open.push_back(k);
    int kc = 0;
    for (auto it = open.rbegin(); it != open.rend(); ++it)
        if (*it != n) {
            kc = *it;
            break;
        }
    if (kc == 0 || open.empty()) return s;
    auto model = [&](int k, double g) { return g * g * std::pow(double(k), p) / std::abs(double(n) * n - double(k) * k); };
    const double C = std::abs(term(kc)) / model(kc, mt.gamma[kc]);
    const int kl = open.back();
    double rho = 0.5;
    if (open.size() >= 2) {
        const int kp = open[open.size() - 2];
        rho = std::pow(mt.gamma[kl] / mt.gamma[kp], 1.0 / (kl - kp));
    }
    rho = std::min(rho, 0.9);
    double g = mt.gamma[kl] * std::pow(rho, mt.K - kl);
    double r = 0.0;
    for (int k = mt.K + 1; k <= mt.K + 200; ++k) {
        g *= rho;
        if (k == n) continue;
        r += C * model(k, g);
    }
    *tail = kTailSafety * r;
    return s;
}

}  // namespace

double omega1_star(const MomentTable& mt, int n, double* tail, int* last) {
    const auto& O2 = mt.omega2();
    const double s = stop_rule_sum(mt, n, [&](int k) { return k * O2[n][k]; }, 0, tail, last);
    if (tail) *tail *= 12.0;
    return -12.0 * s;
}

double omega2_star(const MomentTable& mt, int n, double* tail, int* last) {
    const auto& O2 = mt.omega2();
    const auto& O4 = mt.omega4();
    const double c = 160.0 * kPi * kPi;
    return stop_rule_sum(
        mt, n, [&](int k) { return -c * double(k) * k * k * O2[n][k] + 80.0 * k * O4[n][k]; }, 2, tail, last);
}

FrequencyReport frequencies(const MomentTable& mt, double mean, double H0) {
    FrequencyReport f;
    f.N = mt.N;
    f.K = mt.K;
    f.mean = mean;
    f.H0 = H0;
    const int N = mt.N;
    for (auto* v : {&f.omega1, &f.omega1_star, &f.omega2, &f.omega2_star, &f.tail1, &f.tail2}) v->assign(N + 1, 0.0);
    f.terms.assign(N + 1, 0);
    f.warning.assign(N + 1, false);
    const bool have4 = mt.omega.count(4) > 0;
    const double c = mean;
    for (int n = 1; n <= N; ++n) {
        const double k = 2.0 * n * kPi;
        int l1 = 0, l2 = 0;
        const double w1 = omega1_star(mt, n, &f.tail1[n], &l1);
        f.omega1_star[n] = w1;
        f.omega1[n] = k * k * k + 6.0 * c * k + w1;
        f.terms[n] = l1;
        f.warning[n] = f.tail1[n] > 0.1 * std::abs(w1);
        if (have4) {
            const double w2 = omega2_star(mt, n, &f.tail2[n], &l2);
            f.omega2_star[n] = w2;
            f.omega2[n] = std::pow(k, 5) + 10.0 * k * k * k * c + 20.0 * k * H0 + 60.0 * n * kPi * c * c + w2 +
                          10.0 * c * w1;
            f.terms[n] = std::max(l1, l2);
            f.warning[n] = f.warning[n] || f.tail2[n] > 0.1 * std::abs(w2);
        }
    }
    return f;
}

void direct_hamiltonians(const Potential& q, int grid, double& H0, double& H1, double& H2) {
    if (grid < 8) throw std::invalid_argument("direct_hamiltonians: grid too small");
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int j = 0; j < grid; ++j) {
        const double x = double(j) / grid;
        const double u = q.evaluate(x), ux = q.derivative(x, 1), uxx = q.derivative(x, 2);
        s0 += u * u;
        s1 += ux * ux + 2.0 * u * u * u;
        s2 += uxx * uxx + 10.0 * u * ux * ux + 5.0 * u * u * u * u;
    }
    H0 = 0.5 * s0 / grid;
    H1 = 0.5 * s1 / grid;
    H2 = 0.5 * s2 / grid;
}

HamiltonianValues hamiltonians(const Potential& q, const ActionVector& act, const MomentTable& mt, int grid) {
    if (q.mean() != 0.0) throw std::invalid_argument("hamiltonians: potential must have zero mean");
    HamiltonianValues h;
    direct_hamiltonians(q, grid, h.H0, h.H1, h.H2);
    double s1 = 0.0, s3 = 0.0, s5 = 0.0;
    for (int n = 1; n <= act.N; ++n) {
        const double k = 2.0 * n * kPi;
        s1 += k * act.I[n];
        s3 += k * k * k * act.I[n];
        s5 += std::pow(k, 5) * act.I[n];
    }
    h.H0_actions = s1;
    h.H1_star_subtraction = h.H1 - s3;
    h.H2_star_direct = h.H2 - s5 - 10.0 * h.H0 * h.H0;
    const auto& R3 = mt.R.at(3);
    const auto& R5 = mt.R.at(5);
    for (int n = 1; n < static_cast<int>(R3.size()); ++n) {
        const double k = 2.0 * n * kPi;
        h.H1_star += -4.0 * k * R3[n];
        h.H2_star += -(40.0 / 3.0) * k * k * k * R3[n] + 16.0 * k * R5[n];
    }
    double err = 0.0;
    for (int n = 1; n <= act.N; ++n) err += std::pow(2.0 * n * kPi, 3) * act.error[n];
    h.h1_disagree = std::abs(h.H1_star - h.H1_star_subtraction) >
                    std::max(1e-8 * std::max(std::abs(h.H1), 1.0), 10.0 * err);
    return h;
}

Analysis analyze(const Potential& qin, int N, const AnalysisOptions& opt) {
    if (N < 1) throw std::invalid_argument("analyze: N must be >= 1");
    const Potential q = qin.zero_mean();
    const int M = opt.M > 0 ? opt.M : N;
    if (M < N) throw std::invalid_argument("analyze: M must be >= N");
    Analysis a;
    a.spec = periodic_spectrum(q, M, opt.spectrum);
    a.psi.resize(N + 1);
    detail::parallel_for(N, opt.jobs,
                         [&](int i) { a.psi[i + 1] = psi_solve(a.spec, i + 1, M, opt.psi_tol, opt.nodes); });
    a.act = actions(a.spec, opt.nodes);
    MomentOptions mo;
    mo.nodes = opt.nodes;
    mo.tol = opt.spectrum.tol;
    mo.orders = opt.orders;
    mo.jobs = opt.jobs;
    a.mom = moments(q, a.spec, a.psi, N, M, mo);
    if (a.mom.omega.count(2) && a.mom.omega.count(4)) {
        a.ham = hamiltonians(q, a.act, a.mom);
    } else {
        direct_hamiltonians(q, 4096, a.ham.H0, a.ham.H1, a.ham.H2);
    }
    if (a.mom.omega.count(2)) {
        if (a.mom.omega.count(4)) {
            a.freq = frequencies(a.mom, qin.mean(), a.ham.H0);
        } else {
            auto tmp = a.mom;
            tmp.omega[4].assign(N + 1, std::vector<double>(M + 1, 0.0));
            a.freq = frequencies(tmp, qin.mean(), a.ham.H0);
        }
    }
    return a;
}

PotentialFamily cosine_family(const std::vector<int>& A) {
    return [A](const std::vector<double>& a) {
        if (a.size() != A.size()) throw std::invalid_argument("cosine_family: parameter count mismatch");
        std::vector<std::pair<int, double>> m;
        for (std::size_t i = 0; i < A.size(); ++i) m.emplace_back(A[i], a[i]);
        return families::cosine_modes(m);
    };
}

JacobianResult frequency_jacobian(const PotentialFamily& family, const std::vector<int>& A,
                                  const std::vector<double>& base, double h, Model model, const AnalysisOptions& opt) {
    const int d = static_cast<int>(A.size());
    if (d == 0 || base.size() != A.size()) throw std::invalid_argument("frequency_jacobian: bad index set");
    if (!(h > 0.0)) throw std::invalid_argument("frequency_jacobian: step must be positive");
    int N = 0;
    for (int j : A) {
        if (j < 1) throw std::invalid_argument("frequency_jacobian: indices must be >= 1");
        N = std::max(N, j);
    }
    N *= 2;
    AnalysisOptions o = opt;
    o.orders = model == Model::kdv ? std::vector<int>{2} : std::vector<int>{2, 4};

    auto sample = [&](const std::vector<double>& p, Eigen::VectorXd& I, Eigen::VectorXd& w) {
        const auto an = analyze(family(p), N, o);
        I.resize(d);
        w.resize(d);
        for (int i = 0; i < d; ++i) {
            I[i] = an.act.I[A[i]];
            w[i] = model == Model::kdv ? an.freq.omega1_star[A[i]] : an.freq.omega2_star[A[i]];
        }
    };

    JacobianResult r;
    r.dI.resize(d, d);
    r.dw.resize(d, d);
    for (int j = 0; j < d; ++j) {
        auto p = base, m = base;
        p[j] += h;
        m[j] -= h;
        Eigen::VectorXd Ip, wp, Im, wm;
        sample(p, Ip, wp);
        sample(m, Im, wm);
        r.dI.col(j) = (Ip - Im) / (2.0 * h);
        r.dw.col(j) = (wp - wm) / (2.0 * h);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(r.dI);
    const auto sv = svd.singularValues();
    r.condition = sv[0] / sv[d - 1];
    if (!(sv[d - 1] > 0.0) || r.condition > 1e10)
        throw std::runtime_error("frequency_jacobian: I-increment matrix ill conditioned (cond " +
                                 std::to_string(r.condition) + ")");
    r.J = r.dw * r.dI.inverse();
    r.symmetry_defect = (r.J - r.J.transpose()).norm() / r.J.norm();
    const Eigen::MatrixXd S = 0.5 * (r.J + r.J.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    r.sym_eigenvalues = es.eigenvalues();
    r.negative_definite = r.sym_eigenvalues.maxCoeff() < 0.0;
    return r;
}

}  // namespace kdvlab
