#include "kdvlab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "kdvlab/bnf.hpp"

namespace kdvlab {

namespace {

constexpr double kPi = std::numbers::pi;

double weight(double n, double s) { return std::pow(1.0 + std::abs(n), s); }

}  // namespace

void BirkhoffState::set(double n, cplx zp, cplx zn) {
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("BirkhoffState: mode index must be positive");
    if (real && std::abs(zn - std::conj(zp)) > 1e-14 * std::max(1.0, std::abs(zp)))
        throw std::invalid_argument("BirkhoffState: real state needs z_{-n} = conj(z_n)");
    auto it = std::lower_bound(modes.begin(), modes.end(), n,
                               [](const BirkhoffMode& m, double v) { return m.n < v; });
    if (it != modes.end() && it->n == n) {
        it->zp = zp;
        it->zn = zn;
    } else {
        modes.insert(it, BirkhoffMode{n, zp, zn});
    }
}

const BirkhoffMode* BirkhoffState::find(double n) const {
    auto it = std::lower_bound(modes.begin(), modes.end(), n,
                               [](const BirkhoffMode& m, double v) { return m.n < v; });
    return it != modes.end() && it->n == n ? &*it : nullptr;
}

double BirkhoffState::H0() const {
    double s = 0.0;
    for (const auto& m : modes) s += 2.0 * m.n * kPi * m.action();
    return s;
}

double BirkhoffState::reality_defect() const {
    double d = 0.0;
    for (const auto& m : modes) d = std::max(d, std::abs(m.zn - std::conj(m.zp)));
    return d;
}

FrequencyFn kdv_pure_model() {
    return [](const BirkhoffState& z) {
        std::vector<double> w;
        w.reserve(z.modes.size());
        for (const auto& m : z.modes) w.push_back(-6.0 * m.action());
        return w;
    };
}

FrequencyFn kdv2_pure_model() {
    return [](const BirkhoffState& z) {
        const double H0 = z.H0();
        std::vector<double> w;
        w.reserve(z.modes.size());
        for (const auto& m : z.modes) w.push_back(40.0 * m.n * kPi * H0 - 80.0 * m.n * m.n * kPi * kPi * m.action());
        return w;
    };
}

FrequencyFn bnf_frequency(Model which, double c) {
    return [which, c](const BirkhoffState& z) {
        int N = 0;
        for (const auto& m : z.modes) {
            if (m.n != std::floor(m.n) || m.n > 1e6)
                throw std::invalid_argument("bnf_frequency: modes must be integers below 1e6");
            N = std::max(N, static_cast<int>(m.n));
        }
        std::vector<double> I(N + 1, 0.0);
        for (const auto& m : z.modes) I[static_cast<int>(m.n)] = std::max(0.0, m.action());
        const auto p = bnf_predict(I, c, which);
        std::vector<double> w;
        for (const auto& m : z.modes) w.push_back(p.omega[static_cast<int>(m.n)]);
        return w;
    };
}

FrequencyFn table_frequency(std::map<double, double> table) {
    return [table = std::move(table)](const BirkhoffState& z) {
        std::vector<double> w;
        for (const auto& m : z.modes) {
            auto it = table.find(m.n);
            w.push_back(it == table.end() ? 0.0 : it->second);
        }
        return w;
    };
}

BirkhoffState flow_map(const BirkhoffState& z, double t, const FrequencyFn& freq) {
    BirkhoffState out = z;
    if (t == 0.0) return out;
    const auto w = freq(z);
    if (w.size() != z.modes.size()) throw std::invalid_argument("flow_map: frequency count mismatch");
    for (std::size_t i = 0; i < w.size(); ++i) {
        const cplx e = std::polar(1.0, w[i] * t);
        out.modes[i].zp *= e;
        out.modes[i].zn *= std::conj(e);
    }
    return out;
}

double h_norm(const BirkhoffState& z, double s) {
    double acc = 0.0;
    for (const auto& m : z.modes) acc += weight(m.n, 2.0 * s) * (std::norm(m.zp) + std::norm(m.zn));
    return std::sqrt(acc);
}

double h_distance(const BirkhoffState& a, const BirkhoffState& b, double s) {
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.modes.size() || j < b.modes.size()) {
        double n;
        cplx dp, dn;
        if (j == b.modes.size() || (i < a.modes.size() && a.modes[i].n < b.modes[j].n)) {
            n = a.modes[i].n;
            dp = a.modes[i].zp;
            dn = a.modes[i].zn;
            ++i;
        } else if (i == a.modes.size() || b.modes[j].n < a.modes[i].n) {
            n = b.modes[j].n;
            dp = b.modes[j].zp;
            dn = b.modes[j].zn;
            ++j;
        } else {
            n = a.modes[i].n;
            dp = a.modes[i].zp - b.modes[j].zp;
            dn = a.modes[i].zn - b.modes[j].zn;
            ++i;
            ++j;
        }
        acc += weight(n, 2.0 * s) * (std::norm(dp) + std::norm(dn));
    }
    return std::sqrt(acc);
}

namespace {

void finish(ContinuityTable& tab) {
    tab.crossover = -1;
    // scan from the back: longest suffix of designated rows with input < output
    for (auto it = tab.rows.rbegin(); it != tab.rows.rend(); ++it) {
        if (!it->designated || it->precision_limited) continue;
        if (it->input_gap < it->output_gap)
            tab.crossover = it->m;
        else
            break;
    }
}

ContinuityRow make_row(int m, double n, int k, const BirkhoffState& p, const BirkhoffState& q, double t, double s,
                       const FrequencyFn& freq, double eta) {
    ContinuityRow r;
    r.m = m;
    r.n = n;
    r.input_gap = h_distance(p, q, s);
    const auto pt = flow_map(p, t, freq), qt = flow_map(q, t, freq);
    r.output_gap = h_distance(pt, qt, s);
    const auto wp = freq(p), wq = freq(q);
    double big = 0.0;
    for (std::size_t i = 0; i < p.modes.size(); ++i) {
        big = std::max(big, std::abs(wp[i] * t));
        if (p.modes[i].n == n) r.phase = wp[i] * t;
    }
    for (std::size_t i = 0; i < q.modes.size(); ++i) {
        big = std::max(big, std::abs(wq[i] * t));
        if (q.modes[i].n == n) r.phase -= wq[i] * t;
    }
    // phases of size 1e14 carry no usable digits in double
    r.precision_limited = big * std::numeric_limits<double>::epsilon() > 1e-2;
    r.designated = m % k == 0 && (m / k) % 2 == 1;
    if (r.precision_limited)
        r.verdict = "precision-limited";
    else if (!r.designated)
        r.verdict = "off-subsequence";
    else
        r.verdict = r.output_gap >= eta ? "separated" : "inconclusive";
    return r;
}

}  // namespace

ContinuityTable kdv_continuity_experiment(const std::vector<int>& ms, const KdvExperimentOptions& opt) {
    if (!(opt.sigma > 0.0)) throw std::invalid_argument("kdv_continuity_experiment: sigma must be positive");
    if (!(opt.t >= 0.0) || opt.k < 1) throw std::invalid_argument("kdv_continuity_experiment: need t >= 0, k >= 1");
    if (opt.t == 0.0 && !(opt.delta > 0.0))
        throw std::invalid_argument("kdv_continuity_experiment: t = 0 needs an explicit delta");
    ContinuityTable tab;
    tab.sigma = opt.sigma;
    tab.t = opt.t;
    tab.k = opt.k;
    tab.delta = opt.delta > 0.0 ? opt.delta : std::sqrt(kPi / (6.0 * opt.t * opt.k));
    if (opt.delta < 0.0) throw std::invalid_argument("kdv_continuity_experiment: delta must be >= 0");
    tab.eta = 0.5 * tab.delta;
    const FrequencyFn freq = opt.freq ? opt.freq : kdv_pure_model();
    double top = 0.0;
    for (const auto& md : opt.base.modes) top = std::max(top, md.n);
    for (int m : ms) {
        if (m < 1 || m > 1000) throw std::invalid_argument("kdv_continuity_experiment: m out of range");
        const double n = std::ldexp(1.0, m);
        if (n <= top) continue;
        BirkhoffState p = opt.base, q = opt.base;
        const double a = tab.delta * std::pow(n, opt.sigma);
        const double b = tab.delta * std::sqrt(double(m));
        p.set_real(n, a);
        q.set_real(n, cplx(a, b));
        tab.rows.push_back(make_row(m, n, opt.k, p, q, opt.t, -opt.sigma, freq, tab.eta));
    }
    finish(tab);
    return tab;
}

ContinuityTable kdv2_continuity_experiment(const std::vector<int>& ms, const Kdv2ExperimentOptions& opt) {
    if (!(opt.t >= 0.0) || opt.k < 1 || opt.N < 1)
        throw std::invalid_argument("kdv2_continuity_experiment: need t >= 0, k >= 1, N >= 1");
    if (opt.t == 0.0 && !(opt.delta > 0.0))
        throw std::invalid_argument("kdv2_continuity_experiment: t = 0 needs an explicit delta");
    const bool hs = opt.variant == Kdv2Variant::hs;
    if (hs && opt.sigma < 1.0) throw std::invalid_argument("kdv2_continuity_experiment: hs variant needs sigma >= 1");
    if (!hs && (opt.sigma < 0.5 || opt.sigma >= 1.0))
        throw std::invalid_argument("kdv2_continuity_experiment: level-set variant needs 1/2 <= sigma < 1");
    if (!hs && !(opt.eps > 0.0)) throw std::invalid_argument("kdv2_continuity_experiment: eps must be positive");
    ContinuityTable tab;
    tab.sigma = opt.sigma;
    tab.t = opt.t;
    tab.k = opt.k;
    const double N = opt.N;
    if (opt.delta < 0.0) throw std::invalid_argument("kdv2_continuity_experiment: delta must be >= 0");
    if (hs) {
        tab.delta = opt.delta > 0.0 ? opt.delta : 1.0 / std::sqrt(80.0 * N * kPi * opt.t * opt.k);
        tab.eta = 0.5 * tab.delta;
    } else {
        tab.delta = opt.delta > 0.0 ? opt.delta : 1.0 / std::sqrt(80.0 * opt.eps * opt.eps * kPi * opt.t * opt.k);
        if (!(tab.delta < opt.eps)) throw std::invalid_argument("kdv2_continuity_experiment: need delta < eps");
        tab.eta = 0.5 * tab.delta * opt.eps;
    }
    const FrequencyFn freq = opt.freq ? opt.freq : kdv2_pure_model();
    const double d = tab.delta, e = opt.eps, s = opt.sigma;
    for (int m : ms) {
        if (m < 1 || m > 1000) throw std::invalid_argument("kdv2_continuity_experiment: m out of range");
        const double n = std::ldexp(1.0, m);
        if (n <= N) continue;
        BirkhoffState p, q;
        if (hs) {
            p.set_real(N, d * std::sqrt(m / n));
            const double a = d * std::pow(n, -s);
            p.set_real(n, a);
            q.set_real(n, a);
        } else {
            const double rp = 1.0 - d * d / N * std::pow(n, 1.0 - 2.0 * s);
            const double rq = 1.0 - d * d / N * (std::pow(n, 1.0 - 2.0 * s) + m / n);
            if (!(rq > 0.0)) throw std::invalid_argument("kdv2_continuity_experiment: radicand not positive");
            p.set_real(N, e * std::sqrt(rp));
            q.set_real(N, e * std::sqrt(rq));
            const double a = d * e * std::pow(n, -s);
            p.set_real(n, a);
            q.set_real(n, cplx(a, d * e * std::sqrt(double(m)) / n));
        }
        tab.rows.push_back(make_row(m, n, opt.k, p, q, opt.t, s, freq, tab.eta));
    }
    finish(tab);
    return tab;
}

}  // namespace kdvlab
