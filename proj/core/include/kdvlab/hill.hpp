#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdvlab/potential.hpp"

namespace kdvlab {

/// Raised when the monodromy integration cannot reach x = 1.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, cplx lambda) : std::runtime_error(what), lambda_(lambda) {}
    cplx lambda() const { return lambda_; }

private:
    cplx lambda_;
};

/// Raised when a spectral root cannot be isolated.
class BracketError : public std::runtime_error {
public:
    BracketError(const std::string& what, int n) : std::runtime_error(what), n_(n) {}
    int index() const { return n_; }

private:
    int n_;
};

struct DiscriminantValue {
    cplx delta;       ///< y1(1) + y2'(1)
    cplx delta_dot;   ///< d/dlambda of delta
    cplx y2_at_1;     ///< Dirichlet characteristic function
    double wronskian_residual = 0.0;
    /// (delta^2 - 4)/4 evaluated as ((y1 - y2')/2)^2 + y1' y2, which keeps
    /// full absolute accuracy where delta is close to +-2.
    cplx excess;
    cplx y1, y1p, y2p;
};

/// Monodromy of -y'' + q y = lambda y over [0,1] with the lambda-derivative
/// system integrated alongside. `tol` is the local tolerance of the embedded
/// Runge-Kutta-Fehlberg 7(8) pair.
DiscriminantValue discriminant(const Potential& q, cplx lambda, double tol = 1e-13);
/// Real-lambda fast path (real arithmetic throughout).
DiscriminantValue discriminant(const Potential& q, double lambda, double tol = 1e-13);

struct HillSpectrum {
    int N = 0;
    double tol = 0.0;
    double mean = 0.0;
    /// index 0..N; lambda_plus[0] = lambda_0^+, lambda_minus[0] unused (NaN)
    std::vector<double> lambda_plus, lambda_minus;
    /// index 1..N (slot 0 unused)
    std::vector<double> mu, lambda_dot, gamma, tau;

    bool open(int n) const { return n >= 1 && n <= N && gamma[n] > 0.0; }
    std::vector<int> open_gaps() const;
    /// same spectrum with every eigenvalue shifted by c (L(q + c) = L(q) + c)
    HillSpectrum shifted(double c) const;
};

struct SpectrumOptions {
    double tol = 1e-13;            ///< ODE tolerance
    double collapse = 1e-9;        ///< gaps below this are reported as exactly 0
    bool dirichlet = true;         ///< compute mu_n as well
};

/// Periodic, Dirichlet, and critical spectra for 0 <= n <= N. Works on the
/// zero-mean part and shifts by the mean.
HillSpectrum periodic_spectrum(const Potential& q, int N, const SpectrumOptions& opt = {});
inline HillSpectrum periodic_spectrum(const Potential& q, int N, double tol) {
    SpectrumOptions o;
    o.tol = tol;
    return periodic_spectrum(q, N, o);
}

}  // namespace kdvlab
