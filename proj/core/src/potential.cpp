#include "kdvlab/potential.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace kdvlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Potential Potential::make(const std::vector<std::pair<int, cplx>>& pairs, double mean) {
    if (!std::isfinite(mean)) throw std::invalid_argument("potential: non-finite mean");
    Potential q;
    q.mean_ = mean;
    for (const auto& [n, u] : pairs) {
        if (n == 0) throw std::invalid_argument("potential: mode 0 must be passed as mean");
        if (!std::isfinite(u.real()) || !std::isfinite(u.imag()))
            throw std::invalid_argument("potential: non-finite coefficient at mode " + std::to_string(n));
        const int m = std::abs(n);
        if (q.pos_.count(m)) throw std::invalid_argument("potential: duplicate mode " + std::to_string(m));
        const cplx up = n > 0 ? u : std::conj(u);
        q.pos_[m] = up;
    }
    // drop exact zeros so that "trigonometric polynomial" means what it says
    for (auto it = q.pos_.begin(); it != q.pos_.end();) {
        if (it->second == cplx(0.0)) it = q.pos_.erase(it);
        else ++it;
    }
    for (const auto& [m, u] : q.pos_) {
        q.coeffs_[m] = u;
        q.coeffs_[-m] = std::conj(u);
    }
    return q;
}

cplx Potential::coeff(int n) const {
    if (n == 0) return mean_;
    auto it = coeffs_.find(n);
    return it == coeffs_.end() ? cplx(0.0) : it->second;
}

std::vector<int> Potential::positive_modes() const {
    std::vector<int> out;
    out.reserve(pos_.size());
    for (const auto& kv : pos_) out.push_back(kv.first);
    return out;
}

int Potential::max_mode() const { return pos_.empty() ? 0 : pos_.rbegin()->first; }

double Potential::evaluate(double x) const {
    double s = mean_;
    for (const auto& [n, u] : pos_) {
        const double a = kTwoPi * n * x;
        s += 2.0 * (u.real() * std::cos(a) - u.imag() * std::sin(a));
    }
    return s;
}

double Potential::derivative(double x, int k) const {
    if (k == 0) return evaluate(x);
    double s = 0.0;
    for (const auto& [n, u] : pos_) {
        const double w = kTwoPi * n;
        // d^k/dx^k e^{iwx} = (iw)^k e^{iwx}
        const cplx f = std::pow(cplx(0.0, w), k) * u * std::exp(cplx(0.0, w * x));
        s += 2.0 * f.real();
    }
    return s;
}

cplx Potential::evaluate_complex(double x) const {
    cplx s = mean_;
    for (const auto& [n, u] : coeffs_) s += u * std::exp(cplx(0.0, kTwoPi * n * x));
    return s;
}

double Potential::coeff_l1() const {
    double s = 0.0;
    for (const auto& kv : coeffs_) s += std::abs(kv.second);
    return s;
}

Potential Potential::zero_mean() const { return with_mean(0.0); }

Potential Potential::with_mean(double c) const {
    Potential q = *this;
    q.mean_ = c;
    return q;
}

Potential Potential::scaled(double s) const {
    std::vector<std::pair<int, cplx>> pairs;
    for (const auto& [n, u] : pos_) pairs.emplace_back(n, s * u);
    return make(pairs, s * mean_);
}

namespace families {

Potential cosine_mode(int n, double eps, double mean) {
    return Potential::make({{n, cplx(eps)}}, mean);
}

Potential cosine_modes(const std::vector<std::pair<int, double>>& modes, double mean) {
    std::vector<std::pair<int, cplx>> pairs;
    for (const auto& [n, e] : modes) pairs.emplace_back(n, cplx(e));
    return Potential::make(pairs, mean);
}

Potential smooth_random(int K, double amp, double decay, unsigned seed, double mean) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    std::vector<std::pair<int, cplx>> pairs;
    double a = amp;
    for (int n = 1; n <= K; ++n) {
        pairs.emplace_back(n, std::polar(a, phase(rng)));
        a *= decay;
    }
    return Potential::make(pairs, mean);
}

Potential power_law(int K, double amp, double alpha) {
    std::vector<std::pair<int, cplx>> pairs;
    for (int n = 1; n <= K; ++n) pairs.emplace_back(n, cplx(amp * std::pow(double(n), -alpha)));
    return Potential::make(pairs);
}

}  // namespace families

}  // namespace kdvlab
