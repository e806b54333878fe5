#pragma once

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kdvlab/model.hpp"

namespace kdvlab {

using cplx = std::complex<double>;

/// One mode pair. n is a double so that n = 2^m stays exact far beyond int.
struct BirkhoffMode {
    double n = 1.0;
    cplx zp, zn;  ///< z_n, z_{-n}
    double action() const { return (zp * zn).real(); }
};

/// Finitely supported z = (z_n)_{n != 0}; modes kept sorted by n.
struct BirkhoffState {
    std::vector<BirkhoffMode> modes;
    bool real = true;  ///< z_{-n} = conj(z_n)

    /// set z_n (and z_{-n} = conj when real); inserts keeping order
    void set(double n, cplx zp, cplx zn);
    void set_real(double n, cplx z) { set(n, z, std::conj(z)); }
    const BirkhoffMode* find(double n) const;
    /// sum 2 n pi I_n
    double H0() const;
    /// max |z_{-n} - conj z_n|
    double reality_defect() const;
};

/// Frequencies omega_n for each mode of the state, in mode order.
using FrequencyFn = std::function<std::vector<double>(const BirkhoffState&)>;

/// omega_n = -6 I_n (common linear rotation dropped).
FrequencyFn kdv_pure_model();
/// omega_n = 40 n pi H0 - 80 n^2 pi^2 I_n (common linear rotation dropped).
FrequencyFn kdv2_pure_model();
/// Quartic normal-form frequencies at mean c (modes must be integers).
FrequencyFn bnf_frequency(Model which, double c = 0.0);
/// Fixed table n -> omega; modes missing from the table rotate at 0.
FrequencyFn table_frequency(std::map<double, double> table);

/// z_n -> e^{i omega_n t} z_n, z_{-n} -> e^{-i omega_n t} z_{-n}.
BirkhoffState flow_map(const BirkhoffState& z, double t, const FrequencyFn& freq);

/// (sum_{n != 0} <n>^{2s} |z_n|^2)^{1/2}
double h_norm(const BirkhoffState& z, double s);
/// h^s norm of a - b over the union of their supports
double h_distance(const BirkhoffState& a, const BirkhoffState& b, double s);

struct ContinuityRow {
    int m = 0;
    double n = 0.0;
    double input_gap = 0.0;
    double output_gap = 0.0;
    double phase = 0.0;  ///< (omega(p) - omega(q)) t at n_m
    bool designated = false;  ///< m = (2j+1) k
    bool precision_limited = false;  ///< |omega t| too large for double phases
    std::string verdict;  ///< "separated", "inconclusive", "off-subsequence", "precision-limited"
};

struct ContinuityTable {
    double delta = 0.0;
    double eta = 0.0;  ///< required output gap
    double sigma = 0.0, t = 0.0;
    int k = 1;
    std::vector<ContinuityRow> rows;
    /// smallest m with input_gap < output_gap for every later designated row
    /// that is not precision-limited (-1 if none)
    int crossover = -1;
};

struct KdvExperimentOptions {
    double sigma = 0.125;
    double t = 1.0;
    int k = 1;
    /// 0 selects sqrt(pi/(6 t k))
    double delta = 0.0;
    BirkhoffState base;  ///< z°, supported below 2^m
    FrequencyFn freq;    ///< default kdv_pure_model()
};

ContinuityTable kdv_continuity_experiment(const std::vector<int>& ms, const KdvExperimentOptions& opt = {});

enum class Kdv2Variant { hs, level_set };

struct Kdv2ExperimentOptions {
    Kdv2Variant variant = Kdv2Variant::hs;
    double sigma = 1.0;
    double t = 1.0;
    int k = 1;
    int N = 1;
    /// level-set variant: sqrt(z°_N z°_{-N})
    double eps = 0.5;
    /// 0 selects the phase-matched value
    double delta = 0.0;
    FrequencyFn freq;  ///< default kdv2_pure_model()
};

ContinuityTable kdv2_continuity_experiment(const std::vector<int>& ms, const Kdv2ExperimentOptions& opt = {});

}  // namespace kdvlab
