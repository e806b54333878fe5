#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kdvlab {

using cplx = std::complex<double>;

/// Finite complex sequence with a weight exponent s and norm exponent p.
/// With `signed_index` the entries are z_{-L..L} (zero at L); otherwise z_1..z_L.
struct WeightedSeq {
    std::vector<cplx> z;
    double s = 0.0;
    double p = 2.0;  ///< use infinity() for the max norm
    bool signed_index = false;

    int index(std::size_t i) const;
    double norm() const;
};

inline constexpr double p_inf = std::numeric_limits<double>::infinity();

/// <n> = 1 + |n|
inline double bracket(int n) { return 1.0 + (n < 0 ? -n : n); }

/// (sum <n>^{sp} |z_n|^p)^{1/p}, p = infinity supported. z indexed from 1.
double weighted_norm(const std::vector<cplx>& z, double s, double p);

/// (A x)_n = sum_{m != n} x_m / (m^2 - n^2), n, m >= 1. x[0] is x_1.
std::vector<cplx> op_A(const std::vector<cplx>& x);
/// (G x)_n = sum_{m != n} x_m / (m - n)^2.
std::vector<cplx> op_G(const std::vector<cplx>& x);

struct ProductResult {
    cplx value{1.0, 0.0};
    /// certified bound on |prod - 1| (bound mode only, else NaN)
    double bound = std::numeric_limits<double>::quiet_NaN();
    double A = 0.0, B = 0.0, S = 0.0;
};

enum class ProductMode { value, bound };

/// prod (1 + a_m); in bound mode also A e^S + B e^{S + S^2} with A = |sum a|,
/// B = sum |a|^2, S = sum |a|. Throws std::invalid_argument in bound mode if
/// some |a_m| > 1/2.
ProductResult inf_product(const std::vector<cplx>& a, ProductMode mode = ProductMode::value);

/// prod_{m<=M} (m^2 pi^2 - lambda)/(m^2 pi^2), optionally times the tail
/// correction exp(-lambda/pi^2 sum_{m>M} 1/m^2); the limit is sin(sqrt l)/sqrt l.
cplx sin_product(cplx lambda, int M, bool tail_correction = true);

struct SchurResult {
    bool invertible = false;
    double tail_norm = 0.0;
    cplx det_S{0.0, 0.0};
    std::string reason;
};

/// I + T with T split at N into [[A, B], [C, D]] (head X of size N, tail Y).
/// Invertible iff ||D||_2 < 1 and |det(I + A - B (I + D)^{-1} C)| > 1e-12.
SchurResult schur_invertible(const Eigen::MatrixXcd& T, int N);

}  // namespace kdvlab
