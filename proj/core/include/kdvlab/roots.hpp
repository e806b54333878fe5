#pragma once

#include <optional>
#include <vector>

#include "kdvlab/hill.hpp"
#include "kdvlab/potential.hpp"

namespace kdvlab {

enum class GapSide { plus, minus };

/// Both sides of the n-th gap, parametrized by t in [-1, 1].
struct GapContour {
    int n = 0;
    double tau = 0.0;
    double gamma = 0.0;
    GapSide side = GapSide::minus;
    double lo = 0.0, hi = 0.0;  // lambda_n^-, lambda_n^+
    /// real part of lambda_t; the side only fixes the branch
    double lambda(double t) const {
        if (t == -1.0) return lo;
        if (t == 1.0) return hi;
        return tau + 0.5 * t * gamma;
    }
};

GapContour gap_contour(const HillSpectrum& spec, int n, GapSide side = GapSide::minus);

/// Standard root of the n-th gap. Off the gap: (tau - lambda) sqrt+(1 - gamma^2/(4(tau - lambda)^2)).
/// On the gap a side must be given and the value is -+ i (gamma/2) sqrt(1 - t^2) on the (plus, minus) side.
/// Throws std::invalid_argument for lambda strictly inside an open gap without a side.
cplx standard_root(const HillSpectrum& spec, int n, cplx lambda, std::optional<GapSide> side = std::nullopt);

/// Standard root for real lambda outside the open gap, computed in product form.
double standard_root_real(const HillSpectrum& spec, int n, double lambda);

/// Canonical root of delta^2 - 4 with all indices m > M treated as closed gaps.
/// Throws std::invalid_argument for real lambda inside an open gap. Below
/// lambda_0^+ the limit from the upper half plane is returned.
cplx canonical_root(const HillSpectrum& spec, cplx lambda, int M);

/// delta_dot / canonical root in quotient form (tail factors cancel).
cplx delta_dot_over_root(const HillSpectrum& spec, cplx lambda, int M);

/// Gap-local Floquet function F_n at lambda_t on the given side: -acosh on the
/// minus side, +acosh on the plus side, zero at the endpoints.
double floquet_F_on_gap(const Potential& q, const HillSpectrum& spec, int n, double t, GapSide side,
                        double tol = 1e-13);

/// acosh((-1)^n delta/2) at real lambda inside gap n, from the excess field.
double gap_acosh(const Potential& q, int n, double lambda, double tol = 1e-13);

/// nu_n(lambda) = n pi / sqrt+(lambda - lambda_0) * prod_{m != n, open, m <= M} (lambda_m^dot - lambda) / s_m(lambda)
double chi(const HillSpectrum& spec, int n, double lambda, int M);

/// (1/2 pi) times the closed-loop integral of delta_dot / canonical root around gap n.
double loop_integral_delta_dot(const HillSpectrum& spec, int n, int M, int nodes = 96);

/// F at lambda_n^+ rebuilt from band integrals along the real axis; imaginary part ~ -n pi.
cplx floquet_F_reconstruct(const HillSpectrum& spec, int n, int M, int nodes = 96);

struct PsiFunction {
    int n = 0;
    int M = 0;
    int nodes = 0;
    /// sigma[k] for 1 <= k <= M; sigma[n] holds lambda_n^dot
    std::vector<double> sigma;
    /// normalization constant of psi_n
    double prefactor = 0.0;
    /// prefactor * n pi / 2; exactly 1 when the constant equals 2/(n pi)
    double rho = 1.0;
    /// residual of the condition at gap k (0 for collapsed k != n)
    std::vector<double> residuals;
    int iterations = 0;
    double max_residual = 0.0;
};

/// Solve for the roots sigma_k^n of psi_n by Newton iteration. The M used is
/// capped at spec.N.
PsiFunction psi_solve(const HillSpectrum& spec, int n, int M, double tol = 1e-12, int nodes = 96);

/// (1/2 pi) times the loop integral of w * psi_n / canonical root around gap k,
/// where w is sampled at the Chebyshev nodes of the gap (empty = 1).
double psi_gap_integral(const HillSpectrum& spec, const PsiFunction& psi, int k, int nodes,
                        const std::vector<double>& w = {});

/// Integrand of psi_gap_integral at lambda (without the 1/sqrt(1 - t^2) weight
/// and without the n rho factor).
double psi_gap_kernel(const HillSpectrum& spec, const PsiFunction& psi, int k, double lambda);

}  // namespace kdvlab
