#pragma once

#include <functional>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "kdvlab/hill.hpp"
#include "kdvlab/model.hpp"
#include "kdvlab/potential.hpp"
#include "kdvlab/roots.hpp"

namespace kdvlab {

struct ActionEntry {
    double I = 0.0;
    /// |I(nodes) - I(2 nodes)|
    double error = 0.0;
    bool flagged = false;
};

/// I_n from the gap-parametrized formula (quotient form, spectrum only).
/// Exactly 0 for a collapsed gap.
ActionEntry action(const HillSpectrum& spec, int n, int nodes = 96);

struct ActionVector {
    /// index 1..N, slot 0 unused
    std::vector<double> I, error;
    std::vector<bool> flagged;
    int N = 0;
};

ActionVector actions(const HillSpectrum& spec, int nodes = 96);

/// acosh((-1)^k delta/2) at the Chebyshev nodes of gap k (empty when closed).
std::vector<double> gap_acosh_samples(const Potential& q, const HillSpectrum& spec, int k, int nodes,
                                      double tol = 1e-13);

/// Omega^(m)_nk from samples A of gap k. With short_circuit the odd orders
/// and closed gaps return 0 without quadrature; otherwise both gap sides are
/// summed explicitly.
double omega_moment(const HillSpectrum& spec, const PsiFunction& psi, int k, const std::vector<double>& A, int m,
                    bool short_circuit = true);

/// R^(m)_n from samples A of gap n, same conventions.
double r_moment(const HillSpectrum& spec, int n, const std::vector<double>& A, int m, bool short_circuit = true);

struct MomentOptions {
    int nodes = 96;
    double tol = 1e-13;  ///< ODE tolerance for the acosh samples
    std::vector<int> orders{2, 4};
    int jobs = 1;
};

struct MomentTable {
    using Table = std::vector<std::vector<double>>;  // [n][k], 1-based
    int N = 0, K = 0, nodes = 0;
    std::map<int, Table> omega;
    /// R[m][n] for m in {1, 3, 5}
    std::map<int, std::vector<double>> R;
    /// gap lengths 1..K used for tail estimates
    std::vector<double> gamma;

    const Table& omega2() const { return omega.at(2); }
    const Table& omega4() const { return omega.at(4); }
    double at(int m, int n, int k) const { return omega.at(m)[n][k]; }
};

/// psis[n] must hold the solved psi_n for 1 <= n <= N (slot 0 ignored).
MomentTable moments(const Potential& q, const HillSpectrum& spec, const std::vector<PsiFunction>& psis, int N, int K,
                    const MomentOptions& opt = {});

struct FrequencyReport {
    int N = 0, K = 0;
    double mean = 0.0, H0 = 0.0;
    /// index 1..N
    std::vector<double> omega1, omega1_star, omega2, omega2_star;
    std::vector<double> tail1, tail2;
    std::vector<int> terms;  ///< last k included by the stop rule
    std::vector<bool> warning;
};

/// omega^(1)*_n = -12 sum_k k Omega^(2)_nk with the stop rule; *tail gets the
/// dropped-term estimate, *last the final k used.
double omega1_star(const MomentTable& mt, int n, double* tail = nullptr, int* last = nullptr);
/// omega^(2)*_n = -160 pi^2 sum k^3 Omega^(2)_nk + 80 sum k Omega^(4)_nk.
double omega2_star(const MomentTable& mt, int n, double* tail = nullptr, int* last = nullptr);

/// Full frequencies of q + mean, with ★ parts computed on the zero-mean q.
/// H0 is that of the zero-mean part.
FrequencyReport frequencies(const MomentTable& mt, double mean, double H0);

struct HamiltonianValues {
    double H0 = 0.0, H1 = 0.0, H2 = 0.0;
    /// sum (2n pi) I_n
    double H0_actions = 0.0;
    /// H1 - sum (2n pi)^3 I_n
    double H1_star_subtraction = 0.0;
    /// -sum 4 (2n pi) R^(3)_n
    double H1_star = 0.0;
    /// moment sum
    double H2_star = 0.0;
    /// H2 - sum (2n pi)^5 I_n - 10 H0^2
    double H2_star_direct = 0.0;
    bool h1_disagree = false;
};

/// Direct integrals by an M-point trapezoid plus the moment-sum values.
/// q must have zero mean.
HamiltonianValues hamiltonians(const Potential& q, const ActionVector& act, const MomentTable& mt, int grid = 4096);

/// Direct integrals only: H0 = 1/2 int q^2, H1 = 1/2 int (q_x^2 + 2 q^3),
/// H2 = 1/2 int (q_xx^2 + 10 q q_x^2 + 5 q^4).
void direct_hamiltonians(const Potential& q, int grid, double& H0, double& H1, double& H2);

struct AnalysisOptions {
    SpectrumOptions spectrum{};
    /// truncation for psi and products; 0 means N
    int M = 0;
    int nodes = 96;
    double psi_tol = 1e-12;
    int jobs = 1;
    std::vector<int> orders{2, 4};
};

/// Everything at once: spectrum of q (through N), psi_n, actions, moments and
/// frequencies for 1 <= n <= N. The ★ parts use the zero-mean part of q.
struct Analysis {
    HillSpectrum spec;  ///< zero-mean spectrum
    std::vector<PsiFunction> psi;
    ActionVector act;
    MomentTable mom;
    FrequencyReport freq;
    HamiltonianValues ham;
};

Analysis analyze(const Potential& q, int N, const AnalysisOptions& opt = {});

struct JacobianResult {
    Eigen::MatrixXd J;       ///< d omega* / d I on A
    Eigen::MatrixXd dI, dw;  ///< derivatives along the family parameters
    double symmetry_defect = 0.0;  ///< ||J - J^T|| / ||J||
    Eigen::VectorXd sym_eigenvalues;
    bool negative_definite = false;
    double condition = 0.0;  ///< of dI
};

using PotentialFamily = std::function<Potential(const std::vector<double>&)>;

/// Central differences of (I_A, omega*_A) along each family parameter about
/// base. Throws std::runtime_error if the I-increment matrix is ill conditioned.
JacobianResult frequency_jacobian(const PotentialFamily& family, const std::vector<int>& A,
                                  const std::vector<double>& base, double h, Model model,
                                  const AnalysisOptions& opt = {});

/// The standard family sum_{j in A} a_j 2cos(2 pi j x).
PotentialFamily cosine_family(const std::vector<int>& A);

}  // namespace kdvlab
