#pragma once

#include <complex>
#include <map>
#include <utility>
#include <vector>

namespace kdvlab {

using cplx = std::complex<double>;

/// Real 1-periodic trigonometric polynomial q(x) = sum_n u_n e^{i 2 n pi x}.
/// Coefficients are stored for both signs of n with u_{-n} = conj(u_n); the
/// zero mode lives in `mean` only.
class Potential {
public:
    Potential() = default;

    /// Build from (mode, coefficient) pairs. Modes must be distinct and
    /// nonzero; negative modes are accepted and mirrored like positive ones.
    /// Throws std::invalid_argument on duplicates or non-finite data.
    static Potential make(const std::vector<std::pair<int, cplx>>& pairs, double mean = 0.0);

    double mean() const { return mean_; }

    /// Coefficient u_n (u_0 = mean). Zero for modes not stored.
    cplx coeff(int n) const;

    /// Positive modes carrying a nonzero coefficient, ascending.
    std::vector<int> positive_modes() const;
    int max_mode() const;

    double operator()(double x) const { return evaluate(x); }
    double evaluate(double x) const;
    /// k-th x-derivative, computed exactly in Fourier space.
    double derivative(double x, int k) const;
    /// Complex evaluation without discarding the imaginary residue (for checks).
    cplx evaluate_complex(double x) const;

    /// sum over n != 0 of |u_n|
    double coeff_l1() const;
    /// |mean| + sum_{n != 0} |u_n|, an upper bound for sup|q|.
    double sup_bound() const { return std::abs(mean_) + coeff_l1(); }

    Potential zero_mean() const;
    Potential with_mean(double c) const;
    Potential scaled(double s) const;

    bool is_zero() const { return coeffs_.empty() && mean_ == 0.0; }

    /// Positive-mode map (n >= 1 -> u_n).
    const std::map<int, cplx>& positive() const { return pos_; }

private:
    std::map<int, cplx> coeffs_;  // n != 0, both signs
    std::map<int, cplx> pos_;     // n >= 1
    double mean_ = 0.0;
};

/// Test families.
namespace families {

/// eps * 2cos(2 pi n x), i.e. u_{+-n} = eps.
Potential cosine_mode(int n, double eps, double mean = 0.0);

/// Sum of eps_j * 2cos(2 pi n_j x).
Potential cosine_modes(const std::vector<std::pair<int, double>>& modes, double mean = 0.0);

/// Smooth random profile: modes 1..K with |u_n| = amp * decay^(n-1) and
/// uniformly distributed phases from a seeded generator.
Potential smooth_random(int K, double amp, double decay, unsigned seed, double mean = 0.0);

/// Rough profile for sharpness probes: u_n = amp * n^(-alpha) for n <= K.
Potential power_law(int K, double amp, double alpha);

}  // namespace families

}  // namespace kdvlab
