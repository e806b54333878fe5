#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kdvlab/model.hpp"

namespace kdvlab {

/// Quartic normal-form data of the KdV (kdv) or KdV2 (kdv2) Hamiltonian at
/// mean c.
struct BnfModel {
    double c = 0.0;
    bool kdv2 = true;

    /// lambda_n: the frequency at I = 0
    double lambda(int n) const;
    /// C_ij = -d^2 H / dI_i dI_j of the quartic part
    double C(int i, int j) const;
};

struct BnfPrediction {
    double H = 0.0;
    /// omega[n] for 1 <= n <= size of I (slot 0 unused)
    std::vector<double> omega;
};

/// Quartic truncation of H and its I-gradient. I is indexed from 1 (slot 0
/// ignored) and must be nonnegative.
BnfPrediction bnf_predict(const std::vector<double>& I, double c, Model which);

/// det of C_A restricted to A (KdV2), by the rank-one update formula.
double det_CA(double c, const std::vector<int>& A);
/// scale used for relative residuals: prod_i (80 pi^2 i^2 + 60|c|)
double det_CA_scale(double c, const std::vector<int>& A);

/// Values of c where det C_A vanishes, ascending. Singletons give {0}.
/// `tol` is the bisection width.
std::vector<double> singular_set(const std::vector<int>& A, double tol = 1e-13);

struct ResonanceVector {
    /// sparse k: index -> nonzero entry
    std::map<int, std::int64_t> k;
    /// sum over indices outside A of |k_j|
    std::int64_t kz_norm = 0;
    std::string str() const;
};

struct ResonanceScanOptions {
    int Kmax = 6;
    int window = 40;   ///< tail indices 1..window outside A
    int kz_max = 2;    ///< |k_Z| bound
    double rel_tol = 1e-10;  ///< only used for c != 0
    int jobs = 1;
};

struct ResonanceScanResult {
    std::vector<ResonanceVector> offenders;
    std::int64_t checked = 0;
    bool exact = false;  ///< integer arithmetic (c == 0)
};

/// k fails iff k.lambda = 0 and (C k)_A = 0 (KdV2 coefficients at mean c).
ResonanceScanResult resonance_scan(const std::vector<int>& A, double c, const ResonanceScanOptions& opt = {});

struct CombReport {
    std::int64_t triples = 0, quadruples = 0;
    std::int64_t failures = 0;
    bool xi_positive = true;
    std::vector<std::string> first_failures;
    bool ok() const { return failures == 0 && xi_positive; }
};

/// Exhaustive check of the 3- and 4-term fifth-power identities for nonzero
/// entries |k| <= R summing to zero. R must be in [1, 50].
CombReport comb_identities_check(int R);

}  // namespace kdvlab
