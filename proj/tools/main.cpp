#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <fmt/format.h>

#include "json_io.hpp"
#include "kdvlab/bnf.hpp"
#include "kdvlab/flow.hpp"
#include "kdvlab/hill.hpp"
#include "kdvlab/invariants.hpp"
#include "kdvlab/pde.hpp"
#include "kdvlab/seqspace.hpp"

using namespace kdvlab;
using namespace kdvlab::cli;

namespace {

constexpr int kExitOk = 0, kExitInput = 2, kExitNumeric = 3;

struct RunConfig {
    std::string potential;
    int N = 8;
    int M = 0;
    int K = 0;
    double tol = 1e-13;
    int nodes = 96;
    std::string out;
    std::string format = "json";
    int jobs = std::max(1u, std::thread::hardware_concurrency());
    unsigned seed = 20261016u;

    void validate() const {
        if (!(tol > 0.0)) throw InputError("--tol must be positive");
        if (M != 0 && N > M) throw InputError("--N must not exceed --M");
        if (nodes < 4) throw InputError("--nodes must be at least 4");
        if (jobs < 1) throw InputError("--jobs must be at least 1");
    }
    Potential load() const {
        if (potential.empty()) throw InputError("--potential is required for this command");
        return load_potential(potential);
    }
    AnalysisOptions analysis() const {
        AnalysisOptions a;
        a.spectrum.tol = tol;
        a.M = M;
        a.nodes = nodes;
        a.jobs = jobs;
        return a;
    }
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct Output {
    Json json;
    Table table;
};

std::string b(bool v) { return v ? "true" : "false"; }
std::string d(double v) { return fmt_double(v); }

void emit(const RunConfig& cfg, const Output& o) {
    std::ofstream file;
    if (!cfg.out.empty()) {
        file.open(cfg.out);
        if (!file) throw InputError(fmt::format("cannot open output file '{}'", cfg.out));
    }
    std::ostream& os = cfg.out.empty() ? std::cout : file;
    if (cfg.format == "csv") {
        os << fmt::format("{}\n", fmt::join(o.table.header, ","));
        for (const auto& r : o.table.rows) os << fmt::format("{}\n", fmt::join(r, ","));
    } else {
        write_json(os, o.json);
    }
}

Output cmd_spectrum(const RunConfig& cfg) {
    const auto q = cfg.load();
    SpectrumOptions so;
    so.tol = cfg.tol;
    const auto s = periodic_spectrum(q, cfg.N, so);
    Output o;
    o.json["N"] = s.N;
    o.json["tol"] = s.tol;
    o.json["mean"] = s.mean;
    o.json["lambda_0"] = s.lambda_plus[0];
    o.json["lambda_minus"] = json_array(s.lambda_minus, 1);
    o.json["lambda_plus"] = json_array(s.lambda_plus, 1);
    o.json["gamma"] = json_array(s.gamma, 1);
    o.json["tau"] = json_array(s.tau, 1);
    o.json["lambda_dot"] = json_array(s.lambda_dot, 1);
    o.json["mu"] = json_array(s.mu, 1);
    o.table.header = {"n", "lambda_minus", "lambda_plus", "gamma", "tau", "lambda_dot", "mu"};
    o.table.rows.push_back({"0", "", d(s.lambda_plus[0]), "", "", "", ""});
    for (int n = 1; n <= s.N; ++n)
        o.table.rows.push_back({std::to_string(n), d(s.lambda_minus[n]), d(s.lambda_plus[n]), d(s.gamma[n]),
                                d(s.tau[n]), d(s.lambda_dot[n]), d(s.mu[n])});
    return o;
}

Output cmd_actions(const RunConfig& cfg) {
    const auto q = cfg.load();
    SpectrumOptions so;
    so.tol = cfg.tol;
    const auto s = periodic_spectrum(q.zero_mean(), cfg.N, so);
    const auto a = actions(s, cfg.nodes);
    Output o;
    o.json["N"] = a.N;
    o.json["nodes"] = cfg.nodes;
    o.json["I"] = json_array(a.I, 1);
    o.json["error"] = json_array(a.error, 1);
    o.json["flagged"] = Json::array();
    for (int n = 1; n <= a.N; ++n) o.json["flagged"].push_back(static_cast<bool>(a.flagged[n]));
    o.table.header = {"n", "I", "error", "flagged"};
    for (int n = 1; n <= a.N; ++n)
        o.table.rows.push_back({std::to_string(n), d(a.I[n]), d(a.error[n]), b(a.flagged[n])});
    return o;
}

Json table_json(const MomentTable::Table& t, int N, int K) {
    Json rows = Json::array();
    for (int n = 1; n <= N; ++n) {
        Json r = Json::array();
        for (int k = 1; k <= K; ++k) r.push_back(t[n][k]);
        rows.push_back(r);
    }
    return rows;
}

Output cmd_freq(const RunConfig& cfg, const std::string& nspec, bool dump, bool second) {
    const auto q = cfg.load();
    const auto ns = parse_index_list(nspec.empty() ? fmt::format("1..{}", cfg.N) : nspec);
    const int N = std::max(cfg.N, *std::max_element(ns.begin(), ns.end()));
    const auto a = analyze(q, N, cfg.analysis());
    const auto& f = a.freq;
    Output o;
    o.json["N"] = f.N;
    o.json["K"] = f.K;
    o.json["mean"] = f.mean;
    o.json["H0"] = f.H0;
    Json rows = Json::array();
    if (second) {
        const auto p = bnf_predict(a.act.I, f.mean, Model::kdv2);
        o.table.header = {"n", "I", "omega2", "omega2_star", "tail", "omega2_bnf", "terms", "warning"};
        for (int n : ns) {
            rows.push_back(Json{{"n", n}, {"I", a.act.I[n]}, {"omega2", f.omega2[n]},
                                {"omega2_star", f.omega2_star[n]}, {"tail", f.tail2[n]}, {"omega2_bnf", p.omega[n]},
                                {"terms", f.terms[n]}, {"warning", static_cast<bool>(f.warning[n])}});
            o.table.rows.push_back({std::to_string(n), d(a.act.I[n]), d(f.omega2[n]), d(f.omega2_star[n]),
                                    d(f.tail2[n]), d(p.omega[n]), std::to_string(f.terms[n]), b(f.warning[n])});
        }
    } else {
        o.table.header = {"n", "I", "omega1", "omega1_star", "tail1", "omega2", "omega2_star", "tail2", "terms",
                          "warning"};
        for (int n : ns) {
            rows.push_back(Json{{"n", n},
                                {"I", a.act.I[n]},
                                {"omega1", f.omega1[n]},
                                {"omega1_star", f.omega1_star[n]},
                                {"tail1", f.tail1[n]},
                                {"omega2", f.omega2[n]},
                                {"omega2_star", f.omega2_star[n]},
                                {"tail2", f.tail2[n]},
                                {"terms", f.terms[n]},
                                {"warning", static_cast<bool>(f.warning[n])}});
            o.table.rows.push_back({std::to_string(n), d(a.act.I[n]), d(f.omega1[n]), d(f.omega1_star[n]),
                                    d(f.tail1[n]), d(f.omega2[n]), d(f.omega2_star[n]), d(f.tail2[n]),
                                    std::to_string(f.terms[n]), b(f.warning[n])});
        }
    }
    o.json["rows"] = rows;
    if (dump) {
        const auto& mt = a.mom;
        Json m;
        m["nodes"] = mt.nodes;
        for (const auto& [order, t] : mt.omega) m[fmt::format("omega{}", order)] = table_json(t, mt.N, mt.K);
        for (const auto& [order, r] : mt.R) m[fmt::format("R{}", order)] = json_array(r, 1);
        m["gamma"] = json_array(mt.gamma, 1);
        o.json["moments"] = m;
    }
    return o;
}

Output cmd_hamiltonians(const RunConfig& cfg) {
    const auto q = cfg.load();
    const auto a = analyze(q, cfg.N, cfg.analysis());
    const auto& h = a.ham;
    Output o;
    const std::vector<std::pair<const char*, double>> vals = {
        {"H0", h.H0},
        {"H1", h.H1},
        {"H2", h.H2},
        {"H0_actions", h.H0_actions},
        {"H1_star", h.H1_star},
        {"H1_star_subtraction", h.H1_star_subtraction},
        {"H2_star", h.H2_star},
        {"H2_star_direct", h.H2_star_direct},
    };
    o.json["mean"] = q.mean();
    o.table.header = {"quantity", "value"};
    for (const auto& [k, v] : vals) {
        o.json[k] = v;
        o.table.rows.push_back({k, d(v)});
    }
    o.json["h1_disagree"] = h.h1_disagree;
    o.table.rows.push_back({"h1_disagree", b(h.h1_disagree)});
    return o;
}

Output cmd_bnf(const RunConfig& cfg, const std::string& Aspec, std::optional<double> c_opt) {
    const auto A = parse_index_list(Aspec);
    std::optional<Potential> q;
    if (!cfg.potential.empty()) q = cfg.load();
    const double c = c_opt ? *c_opt : (q ? q->mean() : 0.0);
    const BnfModel m1{c, false}, m2{c, true};
    Output o;
    o.json["A"] = A;
    o.json["c"] = c;
    o.json["det_CA"] = det_CA(c, A);
    o.json["det_CA_scale"] = det_CA_scale(c, A);
    o.json["singular_set"] = singular_set(A);
    Json C = Json::array();
    for (int i : A) {
        Json row = Json::array();
        for (int j : A) row.push_back(m2.C(i, j));
        C.push_back(row);
    }
    o.json["C2"] = C;
    o.table.header = {"i", "lambda1", "lambda2", "C2_ii"};
    for (int i : A) o.table.rows.push_back({std::to_string(i), d(m1.lambda(i)), d(m2.lambda(i)), d(m2.C(i, i))});
    if (q) {
        const int N = std::max(cfg.N, *std::max_element(A.begin(), A.end()));
        const auto a = analyze(*q, N, cfg.analysis());
        Json pred;
        for (auto [name, model] : {std::pair{"kdv", Model::kdv}, std::pair{"kdv2", Model::kdv2}}) {
            const auto p = bnf_predict(a.act.I, q->mean(), model);
            Json w = Json::array(), meas = Json::array();
            for (int i : A) {
                w.push_back(p.omega[i]);
                meas.push_back(model == Model::kdv ? a.freq.omega1[i] : a.freq.omega2[i]);
            }
            pred[name] = Json{{"H", p.H}, {"omega_bnf", w}, {"omega_moment", meas}};
        }
        o.json["prediction"] = pred;
    }
    return o;
}

struct ResonanceArgs {
    std::string A = "1,2";
    double c = 0.0;
    ResonanceScanOptions opt;
};

Output cmd_resonance(const RunConfig& cfg, ResonanceArgs r) {
    const auto A = parse_index_list(r.A);
    r.opt.jobs = cfg.jobs;
    const auto res = resonance_scan(A, r.c, r.opt);
    Output o;
    o.json["A"] = A;
    o.json["c"] = r.c;
    o.json["Kmax"] = r.opt.Kmax;
    o.json["window"] = r.opt.window;
    o.json["kz_max"] = r.opt.kz_max;
    o.json["exact"] = res.exact;
    o.json["checked"] = res.checked;
    o.json["offenders"] = Json::array();
    o.table.header = {"k", "kz_norm"};
    for (const auto& k : res.offenders) {
        o.json["offenders"].push_back(k.str());
        o.table.rows.push_back({k.str(), std::to_string(k.kz_norm)});
    }
    return o;
}

Output cmd_seqtest(const RunConfig& cfg, bool& pass) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto rvec = [&](int L) {
        std::vector<cplx> x(L);
        for (auto& v : x) v = {g(rng), g(rng)};
        return x;
    };
    struct Check {
        std::string name;
        int samples = 0, violations = 0;
        double worst = 0.0;  // largest observed ratio to the bound
    };
    std::vector<Check> checks;

    Check G{"G_bound_4"};
    for (int t = 0; t < 500; ++t) {
        const auto x = rvec(40);
        const auto y = op_G(x);
        for (double p : {1.0, 2.0, p_inf}) {
            const double r = weighted_norm(y, 0.0, p) / (4.0 * weighted_norm(x, 0.0, p));
            G.worst = std::max(G.worst, r);
            G.violations += r > 1.0;
            ++G.samples;
        }
    }
    checks.push_back(G);

    Check P{"inf_product_bound"};
    for (int t = 0; t < 500; ++t) {
        std::vector<cplx> a(1 + t % 20);
        double S = 0.0;
        for (auto& v : a) {
            v = {u(rng), u(rng)};
            S += std::abs(v);
        }
        const double scale = 0.3 * std::abs(u(rng)) / S;
        for (auto& v : a) v *= scale;
        cplx direct = 1.0;
        for (auto v : a) direct *= 1.0 + v;
        const auto r = inf_product(a, ProductMode::bound);
        const double ratio = r.bound > 0 ? std::abs(direct - 1.0) / r.bound : 0.0;
        P.worst = std::max(P.worst, ratio);
        P.violations += std::abs(direct - 1.0) > r.bound;
        ++P.samples;
    }
    checks.push_back(P);

    Check N{"norm_nesting"};
    for (int t = 0; t < 200; ++t) {
        const auto x = rvec(30);
        for (double p : {1.0, 2.0, p_inf}) {
            const double r = weighted_norm(x, -0.5, p) / weighted_norm(x, 0.5, p);
            N.worst = std::max(N.worst, r);
            N.violations += r > 1.0;
            ++N.samples;
        }
    }
    checks.push_back(N);

    // weighted l2 norm of the L x L truncation of A: ell^2_s -> ell^2_{s+1}
    const auto truncated_norm = [](int L, double s) {
        Eigen::MatrixXd W(L, L);
        for (int m = 1; m <= L; ++m) {
            std::vector<cplx> e(L, 0.0);
            e[m - 1] = std::pow(double(m), -s);
            const auto col = op_A(e);
            for (int n = 1; n <= L; ++n) W(n - 1, m - 1) = std::pow(double(n), s + 1) * col[n - 1].real();
        }
        return Eigen::JacobiSVD<Eigen::MatrixXd>(W).singularValues()(0);
    };
    for (double s : {-1.0, 0.0}) {
        Check A{fmt::format("A_norm_doubling_s{}", s)};
        double prev = 0.0;
        for (int L : {32, 64, 128, 256}) {
            const double v = truncated_norm(L, s);
            if (prev > 0.0) {
                const double growth = v / prev;
                A.worst = std::max(A.worst, growth);
                A.violations += growth > 1.05;
                ++A.samples;
            }
            prev = v;
        }
        checks.push_back(A);
    }

    pass = true;
    Output o;
    o.json["seed"] = cfg.seed;
    o.json["checks"] = Json::array();
    o.table.header = {"check", "samples", "violations", "worst_ratio"};
    for (const auto& c : checks) {
        pass = pass && c.violations == 0;
        o.json["checks"].push_back(
            Json{{"name", c.name}, {"samples", c.samples}, {"violations", c.violations}, {"worst_ratio", c.worst}});
        o.table.rows.push_back({c.name, std::to_string(c.samples), std::to_string(c.violations), d(c.worst)});
    }
    o.json["pass"] = pass;
    return o;
}

struct FlowArgs {
    std::string model = "kdv";
    std::optional<double> sigma;
    double t = 1.0;
    int k = 1;
    int m_min = 1, m_max = 20;
    double eps = 0.5;
    int base_mode = 1;
    double delta = 0.0;
};

Output cmd_flow(const FlowArgs& f) {
    if (f.m_min < 1 || f.m_max < f.m_min) throw InputError("need 1 <= --m-min <= --m-max");
    std::vector<int> ms;
    for (int m = f.m_min; m <= f.m_max; ++m) ms.push_back(m);
    ContinuityTable tab;
    if (f.model == "kdv") {
        KdvExperimentOptions o;
        if (f.sigma) o.sigma = *f.sigma;
        o.t = f.t;
        o.k = f.k;
        o.delta = f.delta;
        tab = kdv_continuity_experiment(ms, o);
    } else if (f.model == "kdv2-hs" || f.model == "kdv2-level") {
        Kdv2ExperimentOptions o;
        o.variant = f.model == "kdv2-hs" ? Kdv2Variant::hs : Kdv2Variant::level_set;
        o.sigma = f.sigma ? *f.sigma : (o.variant == Kdv2Variant::hs ? 1.0 : 0.5);
        o.t = f.t;
        o.k = f.k;
        o.N = f.base_mode;
        o.eps = f.eps;
        o.delta = f.delta;
        tab = kdv2_continuity_experiment(ms, o);
    } else {
        throw InputError("--model must be kdv, kdv2-hs or kdv2-level");
    }
    Output out;
    out.json["model"] = f.model;
    out.json["sigma"] = tab.sigma;
    out.json["t"] = tab.t;
    out.json["k"] = tab.k;
    out.json["delta"] = tab.delta;
    out.json["eta"] = tab.eta;
    out.json["crossover"] = tab.crossover;
    out.json["rows"] = Json::array();
    out.table.header = {"m", "input_gap", "output_gap", "verdict"};
    for (const auto& r : tab.rows) {
        out.json["rows"].push_back(Json{{"m", r.m},
                                        {"n", r.n},
                                        {"input_gap", r.input_gap},
                                        {"output_gap", r.output_gap},
                                        {"phase", r.phase},
                                        {"designated", r.designated},
                                        {"verdict", r.verdict}});
        out.table.rows.push_back({std::to_string(r.m), d(r.input_gap), d(r.output_gap), r.verdict});
    }
    return out;
}

Equation parse_eq(const std::string& s) {
    if (s == "airy") return Equation::airy;
    if (s == "kdv") return Equation::kdv;
    if (s == "kdv2") return Equation::kdv2;
    throw InputError(fmt::format("unknown equation '{}'", s));
}

const char* eq_name(Equation e) { return e == Equation::airy ? "airy" : e == Equation::kdv ? "kdv" : "kdv2"; }

struct EvolveArgs {
    std::string config;
    std::string eq;
    std::optional<double> T;
};

/// key = value lines; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open config file '{}'", path));
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r"), z = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, z - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError(fmt::format("{}:{}: expected key = value", path, lineno));
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty()) throw InputError(fmt::format("config: '{}' is not a number", key));
    return x;
}

int evolve_cmd(const RunConfig& cfg, const EvolveArgs& ea) {
    const auto q = cfg.load();
    EvolveOptions opt;
    opt.M = cfg.M;
    opt.stride = 100;
    double T = 0.01;
    std::string eq = "kdv";
    if (!ea.config.empty()) {
        for (const auto& [k, v] : read_config(ea.config)) {
            if (k == "eq")
                eq = v;
            else if (k == "T")
                T = to_double(k, v);
            else if (k == "dt")
                opt.dt = to_double(k, v);
            else if (k == "M")
                opt.M = static_cast<int>(to_double(k, v));
            else if (k == "stride")
                opt.stride = static_cast<int>(to_double(k, v));
            else if (k == "scheme") {
                if (v == "etdrk4")
                    opt.scheme = Scheme::etdrk4;
                else if (v == "ifrk4")
                    opt.scheme = Scheme::ifrk4;
                else
                    throw InputError(fmt::format("config: unknown scheme '{}'", v));
            } else {
                throw InputError(fmt::format("config: unknown key '{}'", k));
            }
        }
    }
    if (!ea.eq.empty()) eq = ea.eq;
    if (ea.T) T = *ea.T;
    opt.eq = parse_eq(eq);
    if (!(T > 0.0)) throw InputError("T must be positive");
    if (opt.stride < 1) throw InputError("stride must be at least 1");
    const auto tr = evolve(q, T, opt);

    std::ofstream file;
    if (!cfg.out.empty()) {
        file.open(cfg.out);
        if (!file) throw InputError(fmt::format("cannot open output file '{}'", cfg.out));
    }
    std::ostream& os = cfg.out.empty() ? std::cout : file;
    const int M = tr.samples.front().M;
    if (cfg.format == "csv") {
        os << "t,n,re,im\n";
        for (const auto& s : tr.samples)
            for (int n = 0; n < M / 2; ++n)
                os << fmt::format("{},{},{},{}\n", d(s.t), n, d(s.mode(n).real()), d(s.mode(n).imag()));
        return kExitOk;
    }
    Json head{{"eq", eq_name(opt.eq)}, {"M", M},      {"dt", tr.dt},
              {"stride", opt.stride},  {"T", T},      {"scheme", opt.scheme == Scheme::etdrk4 ? "etdrk4" : "ifrk4"}};
    write_json(os, head, -1);
    for (const auto& s : tr.samples) {
        Json re = Json::array(), im = Json::array();
        for (int n = 0; n < M / 2; ++n) {
            re.push_back(s.mode(n).real());
            im.push_back(s.mode(n).imag());
        }
        write_json(os, Json{{"t", s.t}, {"re", re}, {"im", im}}, -1);
    }
    return kExitOk;
}

struct CrossArgs {
    std::string eq = "kdv";
    int n = 2;
    std::optional<double> T;
    int grid = 0;
};

Output cmd_crosscheck(const RunConfig& cfg, const CrossArgs& c) {
    const auto q = cfg.load();
    const Equation eq = parse_eq(c.eq);
    if (eq == Equation::airy) throw InputError("crosscheck needs --eq kdv or kdv2");
    if (c.n < 1) throw InputError("--n must be positive");
    // the Fourier phase tracks the angle of mode n only when that mode dominates
    double top = 0.0;
    for (const auto& [k, v] : q.positive()) top = std::max(top, std::abs(v));
    if (top == 0.0 || std::abs(q.coeff(c.n)) < top)
        throw InputError(fmt::format("crosscheck needs mode {} to be the largest Fourier mode of the potential", c.n));
    const auto a = analyze(q, std::max(cfg.N, c.n), cfg.analysis());
    const double moment = eq == Equation::kdv ? a.freq.omega1[c.n] : a.freq.omega2[c.n];
    EvolveOptions opt;
    opt.eq = eq;
    opt.M = c.grid;
    opt.stride = 10;
    const double T = c.T ? *c.T : (eq == Equation::kdv ? 0.05 : 2e-3);
    const auto tr = evolve(q, T, opt);
    const auto fit = measure_mode_frequency(tr, c.n);
    const double rel = std::abs(fit.omega / moment - 1.0);
    Output o;
    o.json["eq"] = c.eq;
    o.json["n"] = c.n;
    o.json["omega_moment"] = moment;
    o.json["omega_pde"] = fit.omega;
    o.json["rel_diff"] = rel;
    o.json["fit_residual"] = fit.residual;
    o.json["T"] = T;
    o.json["dt"] = tr.dt;
    o.json["M"] = tr.samples.front().M;
    o.table.header = {"quantity", "value"};
    for (const auto& [k, v] : o.json.items())
        o.table.rows.push_back({k, v.is_number_float() ? d(v.get<double>()) : v.dump()});
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral, Birkhoff-coordinate and PDE experiments for KdV and KdV2"};
    app.set_version_flag("--version", "kdvlab 0.1.0");
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    app.add_option("--potential", cfg.potential, "potential JSON file or inline JSON object");
    app.add_option("--N", cfg.N, "spectral truncation")->check(CLI::PositiveNumber);
    app.add_option("--M", cfg.M, "product truncation (0: N); grid size for evolve")->check(CLI::NonNegativeNumber);
    app.add_option("--K", cfg.K, "moment sum truncation (0: automatic)")->check(CLI::NonNegativeNumber);
    app.add_option("--tol", cfg.tol, "ODE tolerance");
    app.add_option("--nodes", cfg.nodes, "Gauss-Chebyshev nodes per gap");
    app.add_option("--out", cfg.out, "output file (default stdout)");
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--jobs", cfg.jobs, "worker threads");
    app.add_option("--seed", cfg.seed, "seed for randomized checks");

    auto* spectrum = app.add_subcommand("spectrum", "periodic, Dirichlet and critical spectra");
    auto* acts = app.add_subcommand("actions", "action variables I_n");

    std::string nspec;
    bool dump = false;
    auto* freq = app.add_subcommand("freq", "KdV and KdV2 frequencies from the moment formulas");
    freq->add_option("--n", nspec, "indices, e.g. 1..8 or 1,3");
    freq->add_flag("--dump-moments", dump, "include the moment tables in JSON output");
    auto* freq2 = app.add_subcommand("freq2", "KdV2 frequencies with the normal-form prediction");
    freq2->add_option("--n", nspec, "indices, e.g. 1..8 or 1,3");
    freq2->add_flag("--dump-moments", dump, "include the moment tables in JSON output");

    auto* hams = app.add_subcommand("hamiltonians", "H0, H1, H2 and the renormalized H1*, H2*");

    std::string Aspec = "1,2";
    std::optional<double> bnf_c;
    auto* bnf = app.add_subcommand("bnf", "quartic normal-form data, det C_A and its singular set");
    bnf->add_option("--A", Aspec, "index set, e.g. 1,2");
    bnf->add_option("--c", bnf_c, "mean parameter (default: potential mean or 0)");

    ResonanceArgs ra;
    auto* res = app.add_subcommand("resonance", "nonresonance scan for KdV2 frequencies");
    res->add_option("--A", ra.A, "index set");
    res->add_option("--c", ra.c, "mean parameter");
    res->add_option("--Kmax", ra.opt.Kmax, "max |k_i| on A")->check(CLI::PositiveNumber);
    res->add_option("--window", ra.opt.window, "tail indices outside A")->check(CLI::PositiveNumber);
    res->add_option("--kz", ra.opt.kz_max, "bound on |k_Z|")->check(CLI::NonNegativeNumber);
    res->add_option("--rel-tol", ra.opt.rel_tol, "relative tolerance for c != 0");

    auto* seq = app.add_subcommand("seqtest", "randomized sequence-space property checks");

    FlowArgs fa;
    auto* flow = app.add_subcommand("flow-exp", "continuity experiments for the frequency flow");
    flow->add_option("--model", fa.model, "kdv, kdv2-hs or kdv2-level");
    flow->add_option("--sigma", fa.sigma, "Sobolev index");
    flow->add_option("--t", fa.t, "time");
    flow->add_option("--k", fa.k, "subsequence step")->check(CLI::PositiveNumber);
    flow->add_option("--m-min", fa.m_min, "first m");
    flow->add_option("--m-max", fa.m_max, "last m");
    flow->add_option("--eps", fa.eps, "level-set radius");
    flow->add_option("--base-mode", fa.base_mode, "base mode for the KdV2 experiments")->check(CLI::PositiveNumber);
    flow->add_option("--delta", fa.delta, "amplitude (0: phase-matched default)");

    EvolveArgs ea;
    auto* evo = app.add_subcommand("evolve", "pseudo-spectral time stepping, JSON lines output");
    evo->add_option("--config", ea.config, "key = value file: eq, T, dt, M, stride, scheme");
    evo->add_option("--eq", ea.eq, "airy, kdv or kdv2");
    evo->add_option("--T", ea.T, "final time");

    CrossArgs ca;
    auto* cross = app.add_subcommand("crosscheck", "moment-route versus PDE-route frequency");
    cross->add_option("--eq", ca.eq, "kdv or kdv2");
    cross->add_option("--n", ca.n, "mode index");
    cross->add_option("--T", ca.T, "integration time");
    cross->add_option("--grid", ca.grid, "PDE grid size (0: default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        cfg.validate();
        if (spectrum->parsed()) {
            emit(cfg, cmd_spectrum(cfg));
        } else if (acts->parsed()) {
            emit(cfg, cmd_actions(cfg));
        } else if (freq->parsed()) {
            emit(cfg, cmd_freq(cfg, nspec, dump, false));
        } else if (freq2->parsed()) {
            emit(cfg, cmd_freq(cfg, nspec, dump, true));
        } else if (hams->parsed()) {
            emit(cfg, cmd_hamiltonians(cfg));
        } else if (bnf->parsed()) {
            emit(cfg, cmd_bnf(cfg, Aspec, bnf_c));
        } else if (res->parsed()) {
            emit(cfg, cmd_resonance(cfg, ra));
        } else if (seq->parsed()) {
            bool pass = false;
            emit(cfg, cmd_seqtest(cfg, pass));
            return pass ? kExitOk : kExitNumeric;
        } else if (flow->parsed()) {
            emit(cfg, cmd_flow(fa));
        } else if (evo->parsed()) {
            return evolve_cmd(cfg, ea);
        } else if (cross->parsed()) {
            emit(cfg, cmd_crosscheck(cfg, ca));
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitOk;
}
