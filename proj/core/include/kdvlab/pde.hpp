#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdvlab/potential.hpp"

namespace kdvlab {

using cplx = std::complex<double>;

enum class Equation { airy, kdv, kdv2 };

/// etdrk4: Cox-Matthews exponential time differencing.
/// ifrk4: classical RK4 on the integrating-factor variable; unreliable once
/// the phase mismatch of interacting modes per step is O(1).
enum class Scheme { etdrk4, ifrk4 };

/// Fourier state u(x) = sum_n u_hat[n] e^{2 pi i n x}; u_hat in FFT order
/// (n = 0..M/2-1, then -M/2..-1), Nyquist kept at zero.
struct GridState {
    int M = 0;
    double t = 0.0;
    std::vector<cplx> u_hat;

    cplx mode(int n) const;
    /// largest |u_hat[-n] - conj(u_hat[n])|
    double reality_defect() const;
    /// modes with |u_hat| above `floor` times the largest one
    Potential to_potential(double floor = 1e-15) const;
    /// (sum <n>^{2s} |u_hat_n|^2)^{1/2}
    double sobolev_norm(double s) const;
};

GridState grid_from_potential(const Potential& q, int M);

struct EvolveOptions {
    Equation eq = Equation::kdv;
    double dt = 0.0;  ///< 0 selects the default for eq and M
    int M = 0;        ///< 0 selects 256 (kdv, airy) or 128 (kdv2)
    int stride = 1;   ///< steps between stored samples
    Scheme scheme = Scheme::etdrk4;
    /// reject dt when dt * (stiffness estimate) exceeds this
    double stability_limit = 2.5;
};

struct Trajectory {
    Equation eq = Equation::kdv;
    double dt = 0.0;
    std::vector<GridState> samples;
};

/// Raised when the state stops being finite; carries the last finite state.
class BlowupError : public std::runtime_error {
public:
    BlowupError(const std::string& what, GridState last) : std::runtime_error(what), last_(std::move(last)) {}
    const GridState& last() const { return last_; }

private:
    GridState last_;
};

/// kdv 1e-5, kdv2 2e-7, reduced by (256/M)^3 resp. (128/M)^5 on finer grids.
double default_dt(Equation eq, int M);

/// Rough |lambda| of the linearized explicit part for state u, using the
/// highest occupied mode (the linear symbol itself is integrated exactly).
double stiffness(const GridState& u, Equation eq);

/// Exponential fourth-order stepping from q up to T. Samples include t = 0 and t = T
/// (the final step is shortened to land on T).
Trajectory evolve(const Potential& q, double T, const EvolveOptions& opt = {});

/// Continue from a given state.
Trajectory evolve(const GridState& u0, double T, const EvolveOptions& opt);

/// Exact Airy propagation e^{tL} of q on the grid.
GridState airy_exact(const Potential& q, double t, int M);

struct FrequencyFit {
    double omega = 0.0;
    double residual = 0.0;  ///< rms of the phase fit
};

/// Least-squares slope of the unwrapped arg u_hat_n over samples with
/// t in [t0, t1] (t1 < 0 means all). Throws if a sample spacing lets the
/// phase move by more than pi (estimated from a first-pass slope).
FrequencyFit measure_mode_frequency(const Trajectory& tr, int n, double t0 = 0.0, double t1 = -1.0);

struct DriftReport {
    double max_drift = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> gamma;  ///< [sample][n], n from the given set
    bool partial = false;
};

/// max_n max_t |gamma_n(t) - gamma_n(0)| over every `every`-th sample.
DriftReport isospectral_drift(const Trajectory& tr, const std::vector<int>& ns, int every = 1, double tol = 1e-13);

struct SmoothingRow {
    double t = 0.0, gap = 0.0, ratio = 0.0;  ///< ratio = gap / (1 + t)
};

/// ||u(t) - e^{tL} q||_{H^1} for KdV at the requested times (ascending).
std::vector<SmoothingRow> one_smoothing_gap(const Potential& q, const std::vector<double>& times,
                                            const EvolveOptions& opt = {});

}  // namespace kdvlab
