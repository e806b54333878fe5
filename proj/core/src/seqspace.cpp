#include "kdvlab/seqspace.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kdvlab {

namespace {

constexpr double kPi = std::numbers::pi;

void check_p(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("weighted norm: p must be >= 1");
}

}  // namespace

int WeightedSeq::index(std::size_t i) const {
    if (!signed_index) return static_cast<int>(i) + 1;
    return static_cast<int>(i) - static_cast<int>(z.size() / 2);
}

double WeightedSeq::norm() const {
    check_p(p);
    double acc = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double w = std::pow(bracket(index(i)), s) * std::abs(z[i]);
        acc = std::isinf(p) ? std::max(acc, w) : acc + std::pow(w, p);
    }
    return std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
}

double weighted_norm(const std::vector<cplx>& z, double s, double p) {
    return WeightedSeq{z, s, p, false}.norm();
}

std::vector<cplx> op_A(const std::vector<cplx>& x) {
    const int L = static_cast<int>(x.size());
    std::vector<cplx> y(L);
    for (int n = 1; n <= L; ++n) {
        cplx s = 0.0;
        for (int m = 1; m <= L; ++m)
            if (m != n) s += x[m - 1] / (double(m) * m - double(n) * n);
        y[n - 1] = s;
    }
    return y;
}

std::vector<cplx> op_G(const std::vector<cplx>& x) {
    const int L = static_cast<int>(x.size());
    std::vector<cplx> y(L);
    for (int n = 1; n <= L; ++n) {
        cplx s = 0.0;
        for (int m = 1; m <= L; ++m)
            if (m != n) s += x[m - 1] / (double(m - n) * (m - n));
        y[n - 1] = s;
    }
    return y;
}

ProductResult inf_product(const std::vector<cplx>& a, ProductMode mode) {
    ProductResult r;
    cplx sum = 0.0;
    for (const auto& v : a) {
        if (mode == ProductMode::bound && std::abs(v) > 0.5)
            throw std::invalid_argument("inf_product: |a_m| > 1/2 in bound mode");
        r.value *= 1.0 + v;
        sum += v;
        r.B += std::norm(v);
        r.S += std::abs(v);
    }
    r.A = std::abs(sum);
    if (mode == ProductMode::bound) r.bound = r.A * std::exp(r.S) + r.B * std::exp(r.S + r.S * r.S);
    return r;
}

cplx sin_product(cplx lambda, int M, bool tail_correction) {
    if (M < 1) throw std::invalid_argument("sin_product: M must be >= 1");
    cplx p = 1.0;
    for (int m = 1; m <= M; ++m) {
        const double mm = m * m * kPi * kPi;
        p *= (mm - lambda) / mm;
    }
    if (tail_correction) {
        // sum_{m > M} 1/m^2 = pi^2/6 - sum_{m <= M} 1/m^2, summed backward
        double head = 0.0;
        for (int m = M; m >= 1; --m) head += 1.0 / (double(m) * m);
        p *= std::exp(-lambda / (kPi * kPi) * (kPi * kPi / 6.0 - head));
    }
    return p;
}

SchurResult schur_invertible(const Eigen::MatrixXcd& T, int N) {
    SchurResult r;
    if (T.rows() != T.cols()) throw std::invalid_argument("schur_invertible: matrix must be square");
    const int L = static_cast<int>(T.rows());
    if (N < 0 || N > L) throw std::invalid_argument("schur_invertible: split outside matrix");
    const int t = L - N;
    const auto A = T.topLeftCorner(N, N);
    const auto B = T.topRightCorner(N, t);
    const auto C = T.bottomLeftCorner(t, N);
    const auto D = T.bottomRightCorner(t, t);
    if (t > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(D);
        r.tail_norm = svd.singularValues()(0);
    }
    if (!(r.tail_norm < 1.0)) {
        r.reason = "tail norm >= 1";
        return r;
    }
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(N, N) + A;
    if (t > 0 && N > 0) {
        const Eigen::MatrixXcd ID = Eigen::MatrixXcd::Identity(t, t) + D;
        S -= B * ID.partialPivLu().solve(Eigen::MatrixXcd(C));
    }
    r.det_S = N > 0 ? S.determinant() : cplx(1.0);
    r.invertible = std::abs(r.det_S) > 1e-12;
    if (!r.invertible) r.reason = "Schur complement singular";
    return r;
}

}  // namespace kdvlab
