#include "kdvlab/bnf.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <set>
#include <stdexcept>

#include "parallel.hpp"

namespace kdvlab {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> normalized(const std::vector<int>& A) {
    if (A.empty()) throw std::invalid_argument("bnf: index set must be nonempty");
    std::vector<int> s = A;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end() || s.front() < 1)
        throw std::invalid_argument("bnf: index set must hold distinct positive indices");
    return s;
}

}  // namespace

double BnfModel::lambda(int n) const {
    const double k = 2.0 * n * kPi;
    if (!kdv2) return k * k * k + 6.0 * c * k;
    return std::pow(k, 5) + 10.0 * c * k * k * k + 30.0 * c * c * k;
}

double BnfModel::C(int i, int j) const {
    if (!kdv2) return i == j ? 6.0 : 0.0;
    return i == j ? 60.0 * c : -20.0 * (2.0 * i * kPi) * (2.0 * j * kPi);
}

BnfPrediction bnf_predict(const std::vector<double>& I, double c, Model which) {
    BnfPrediction p;
    const int N = static_cast<int>(I.size()) - 1;
    p.omega.assign(std::max(N + 1, 1), 0.0);
    double H0 = 0.0, s3 = 0.0, s5 = 0.0, q2 = 0.0, q22 = 0.0;
    for (int n = 1; n <= N; ++n) {
        if (!(I[n] >= 0.0)) throw std::invalid_argument("bnf_predict: actions must be nonnegative");
        const double k = 2.0 * n * kPi;
        H0 += k * I[n];
        s3 += k * k * k * I[n];
        s5 += std::pow(k, 5) * I[n];
        q2 += I[n] * I[n];
        q22 += k * k * I[n] * I[n];
    }
    const BnfModel m{c, which == Model::kdv2};
    if (which == Model::kdv) {
        p.H = s3 + 6.0 * c * H0 - 3.0 * q2;
        for (int n = 1; n <= N; ++n) p.omega[n] = m.lambda(n) - 6.0 * I[n];
    } else {
        p.H = s5 + 10.0 * c * s3 + 30.0 * c * c * H0 + 10.0 * H0 * H0 - 10.0 * q22 - 30.0 * c * q2;
        for (int n = 1; n <= N; ++n) {
            const double k = 2.0 * n * kPi;
            p.omega[n] = m.lambda(n) + 20.0 * k * H0 - 20.0 * k * k * I[n] - 60.0 * c * I[n];
        }
    }
    return p;
}

double det_CA(double c, const std::vector<int>& Ain) {
    const auto A = normalized(Ain);
    const std::size_t n = A.size();
    std::vector<double> D(n), B(n);
    for (std::size_t i = 0; i < n; ++i) {
        B[i] = 80.0 * kPi * kPi * A[i] * A[i];
        D[i] = B[i] + 60.0 * c;
    }
    double prod = 1.0;
    for (double d : D) prod *= d;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double p = B[i];
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) p *= D[j];
        s += p;
    }
    return prod - s;
}

double det_CA_scale(double c, const std::vector<int>& Ain) {
    double s = 1.0;
    for (int i : normalized(Ain)) s *= 80.0 * kPi * kPi * i * i + 60.0 * std::abs(c);
    return s;
}

std::vector<double> singular_set(const std::vector<int>& Ain, double tol) {
    const auto A = normalized(Ain);
    if (A.size() == 1) return {0.0};
    auto f = [&](double c) {
        double s = -1.0;
        for (int i : A) s += 1.0 / (1.0 + 3.0 * c / (4.0 * kPi * kPi * i * i));
        return s;
    };
    // f decreases between consecutive poles -p_i
    auto bisect = [&](double lo, double hi) {
        for (int it = 0; it < 400 && hi - lo > tol * std::max(1.0, std::abs(lo)); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            (f(mid) > 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    std::vector<double> roots;
    std::vector<double> poles;
    for (int i : A) poles.push_back(-(4.0 / 3.0) * kPi * kPi * i * i);  // descending
    for (std::size_t v = 1; v < poles.size(); ++v) {
        const double lo = poles[v], hi = poles[v - 1];
        const double eps = 1e-12 * std::abs(lo);
        double a = lo + eps, b = hi - eps;
        if (!(f(a) > 0.0 && f(b) < 0.0)) throw std::runtime_error("singular_set: no sign change between poles");
        roots.push_back(bisect(a, b));
    }
    double hi = 1.0;
    while (f(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("singular_set: positive root not bracketed");
    }
    roots.push_back(bisect(0.0, hi));
    std::sort(roots.begin(), roots.end());
    if (roots.size() != A.size()) throw std::runtime_error("singular_set: root count differs from |A|");
    return roots;
}

std::string ResonanceVector::str() const {
    std::string s = "{";
    bool first = true;
    for (const auto& [j, v] : k) {
        if (!first) s += ", ";
        first = false;
        s += std::to_string(j) + ":" + std::to_string(v);
    }
    return s + "}";
}

ResonanceScanResult resonance_scan(const std::vector<int>& Ain, double c, const ResonanceScanOptions& opt) {
    const auto A = normalized(Ain);
    if (opt.Kmax < 0 || opt.window < 1 || opt.kz_max < 0 || opt.kz_max > 2)
        throw std::invalid_argument("resonance_scan: bad options");
    const std::set<int> inA(A.begin(), A.end());
    std::vector<int> Z;
    for (int j = 1; j <= opt.window; ++j)
        if (!inA.count(j)) Z.push_back(j);

    // tail parts: (index, value) lists with |k_Z| <= kz_max, support <= 2
    std::vector<std::vector<std::pair<int, int>>> tails{{}};
    for (std::size_t a = 0; a < Z.size(); ++a) {
        for (int v = -opt.kz_max; v <= opt.kz_max; ++v)
            if (v != 0) tails.push_back({{Z[a], v}});
        if (opt.kz_max >= 2)
            for (std::size_t b = a + 1; b < Z.size(); ++b)
                for (int va : {-1, 1})
                    for (int vb : {-1, 1}) tails.push_back({{Z[a], va}, {Z[b], vb}});
    }

    const int d = static_cast<int>(A.size());
    const int side = 2 * opt.Kmax + 1;
    std::int64_t total = 1;
    for (int i = 0; i < d; ++i) total *= side;

    ResonanceScanResult res;
    res.exact = c == 0.0;
    const BnfModel m{c, true};
    std::mutex mu;
    std::int64_t checked = 0;

    detail::parallel_for(static_cast<int>(tails.size()), opt.jobs, [&](int ti) {
        const auto& tz = tails[ti];
        std::vector<ResonanceVector> local;
        std::vector<int> kA(d);
        for (std::int64_t code = 0; code < total; ++code) {
            std::int64_t r = code;
            bool nonzero = !tz.empty();
            for (int i = 0; i < d; ++i) {
                kA[i] = static_cast<int>(r % side) - opt.Kmax;
                r /= side;
                nonzero = nonzero || kA[i] != 0;
            }
            if (!nonzero) continue;
            bool offend;
            if (res.exact) {
                // lambda_j = (2 pi)^5 j^5, (C k)_i = -80 pi^2 i (sum_j j k_j - i k_i)
                std::int64_t dot = 0, mom = 0;
                for (int i = 0; i < d; ++i) {
                    const std::int64_t j = A[i];
                    dot += kA[i] * j * j * j * j * j;
                    mom += kA[i] * j;
                }
                for (const auto& [j, v] : tz) {
                    const std::int64_t jj = j;
                    dot += v * jj * jj * jj * jj * jj;
                    mom += v * jj;
                }
                offend = dot == 0;
                for (int i = 0; offend && i < d; ++i) offend = mom - std::int64_t(A[i]) * kA[i] == 0;
            } else {
                double dot = 0.0, scale = 0.0;
                auto add = [&](int j, int v) {
                    dot += v * m.lambda(j);
                    scale += std::abs(v * m.lambda(j));
                };
                for (int i = 0; i < d; ++i) add(A[i], kA[i]);
                for (const auto& [j, v] : tz) add(j, v);
                offend = std::abs(dot) <= opt.rel_tol * scale;
                for (int i = 0; offend && i < d; ++i) {
                    double ck = 0.0, cs = 0.0;
                    auto addc = [&](int j, int v) {
                        ck += m.C(A[i], j) * v;
                        cs += std::abs(m.C(A[i], j) * v);
                    };
                    for (int l = 0; l < d; ++l) addc(A[l], kA[l]);
                    for (const auto& [j, v] : tz) addc(j, v);
                    offend = std::abs(ck) <= opt.rel_tol * std::max(cs, 1e-300);
                }
            }
            if (offend) {
                ResonanceVector rv;
                for (int i = 0; i < d; ++i)
                    if (kA[i] != 0) rv.k[A[i]] = kA[i];
                for (const auto& [j, v] : tz) {
                    rv.k[j] = v;
                    rv.kz_norm += std::abs(v);
                }
                local.push_back(std::move(rv));
            }
        }
        std::lock_guard lk(mu);
        checked += total - (tz.empty() ? 1 : 0);
        for (auto& v : local) res.offenders.push_back(std::move(v));
    });
    res.checked = checked;
    std::sort(res.offenders.begin(), res.offenders.end(),
              [](const ResonanceVector& a, const ResonanceVector& b) { return a.k < b.k; });
    return res;
}

CombReport comb_identities_check(int R) {
    if (R < 1 || R > 50) throw std::invalid_argument("comb_identities_check: R must be in [1, 50]");
    using i64 = std::int64_t;
    auto p5 = [](i64 x) { return x * x * x * x * x; };
    CombReport rep;
    auto fail = [&](const std::string& s) {
        ++rep.failures;
        if (rep.first_failures.size() < 10) rep.first_failures.push_back(s);
    };
    for (i64 k = -R; k <= R; ++k)
        for (i64 l = -R; l <= R; ++l) {
            if (k == 0 || l == 0) continue;
            const i64 m = -(k + l);
            if (m != 0 && std::abs(m) <= R) {
                ++rep.triples;
                // 2 (k^5 + l^5 + m^5) = 5 k l m (k^2 + l^2 + m^2)
                if (2 * (p5(k) + p5(l) + p5(m)) != 5 * k * l * m * (k * k + l * l + m * m))
                    fail("triple " + std::to_string(k) + "," + std::to_string(l) + "," + std::to_string(m));
            }
            for (i64 mm = -R; mm <= R; ++mm) {
                if (mm == 0) continue;
                const i64 n = -(k + l + mm);
                if (n == 0 || std::abs(n) > R) continue;
                ++rep.quadruples;
                const i64 xi = k * k + k * l + l * l + k * mm + l * mm + mm * mm;
                if (xi <= 0) rep.xi_positive = false;
                if (p5(k) + p5(l) + p5(mm) + p5(n) != 5 * (k + l) * (k + mm) * (k + n) * xi)
                    fail("quadruple " + std::to_string(k) + "," + std::to_string(l) + "," + std::to_string(mm) +
                         "," + std::to_string(n));
            }
        }
    return rep;
}

}  // namespace kdvlab
