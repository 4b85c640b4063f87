#include "mviopt/experiment.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "mviopt/diagnostics.hpp"
#include "mviopt/instances.hpp"
#include "mviopt/solver.hpp"
#include "mviopt/trace_io.hpp"

namespace mviopt {

namespace {

using nlohmann::json;

struct InstanceConfig {
    std::string kind;  // hard | matrix-game | p2-synthetic
    // hard
    int t = 1;
    int p = 2;
    double lf = 1.0;
    double la = 0.0;
    std::optional<int> n, m;
    // matrix-game
    int rows = 2, cols = 2;
    double entry_lo = -1.0, entry_hi = 1.0;
    // p2-synthetic
    int dim = 10;
    double l2 = 1.0, skew_scale = 1.0, mu = 0.0;
};

struct SolverBlock {
    int p = 1;
    std::optional<double> lp;
    std::optional<int> k;
    std::vector<int> k_sweep;
    std::string oracle = "p1-closed-form";
    std::optional<double> delta;
    std::optional<double> eps;
    int max_inner = 10000;
    std::optional<double> cert_radius;
    int gap_probes = 256;
    int fit_discard = 4;
};

struct OutputBlock {
    std::string trace = "trace.csv";
    std::string summary = "summary.json";
    bool timings = false;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    InstanceConfig instance;
    SolverBlock solver;
    OutputBlock output;
    std::string raw_bytes;
};

void reject_unknown_keys(const json& obj, const char* where,
                         std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
    }
}

template <class T>
T require(const json& obj, const char* where, const char* key) {
    if (!obj.contains(key))
        throw ConfigError(std::string(where) + ": missing required key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(where) + "." + key + ": " + e.what());
    }
}

template <class T>
T get_or(const json& obj, const char* where, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(where) + "." + key + ": " + e.what());
    }
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot open config: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    ExperimentConfig cfg;
    cfg.raw_bytes = buf.str();

    json j;
    try {
        j = json::parse(cfg.raw_bytes);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error at byte " + std::to_string(e.byte) + ": " +
                          e.what());
    }

    reject_unknown_keys(j, "config", {"schema_version", "seed", "instance", "solver", "output"});
    const int schema = get_or<int>(j, "config", "schema_version", 1);
    if (schema != 1) throw ConfigError("config.schema_version: only version 1 is supported");
    cfg.seed = require<std::uint64_t>(j, "config", "seed");

    const json ji = require<json>(j, "config", "instance");
    reject_unknown_keys(ji, "instance",
                        {"kind", "t", "p", "l_f", "l_a", "n", "m", "rows", "cols", "entry_lo",
                         "entry_hi", "dim", "l2", "skew_scale", "mu"});
    cfg.instance.kind = require<std::string>(ji, "instance", "kind");
    if (cfg.instance.kind == "hard") {
        cfg.instance.t = require<int>(ji, "instance", "t");
        cfg.instance.p = require<int>(ji, "instance", "p");
        cfg.instance.lf = get_or<double>(ji, "instance", "l_f", 1.0);
        cfg.instance.la = get_or<double>(ji, "instance", "l_a", 0.0);
        if (ji.contains("n")) cfg.instance.n = require<int>(ji, "instance", "n");
        if (ji.contains("m")) cfg.instance.m = require<int>(ji, "instance", "m");
    } else if (cfg.instance.kind == "matrix-game") {
        cfg.instance.rows = require<int>(ji, "instance", "rows");
        cfg.instance.cols = require<int>(ji, "instance", "cols");
        cfg.instance.entry_lo = get_or<double>(ji, "instance", "entry_lo", -1.0);
        cfg.instance.entry_hi = get_or<double>(ji, "instance", "entry_hi", 1.0);
        if (cfg.instance.rows < 1 || cfg.instance.cols < 1)
            throw ConfigError("instance.rows/cols: must be >= 1");
        if (!(cfg.instance.entry_lo <= cfg.instance.entry_hi))
            throw ConfigError("instance.entry_lo: must not exceed entry_hi");
    } else if (cfg.instance.kind == "p2-synthetic") {
        cfg.instance.dim = require<int>(ji, "instance", "dim");
        cfg.instance.l2 = require<double>(ji, "instance", "l2");
        cfg.instance.skew_scale = get_or<double>(ji, "instance", "skew_scale", 1.0);
        cfg.instance.mu = get_or<double>(ji, "instance", "mu", 0.0);
        if (cfg.instance.dim < 1) throw ConfigError("instance.dim: must be >= 1");
        if (cfg.instance.l2 <= 0.0) throw ConfigError("instance.l2: must be > 0");
    } else {
        throw ConfigError("instance.kind: expected hard, matrix-game or p2-synthetic");
    }

    const json js = require<json>(j, "config", "solver");
    reject_unknown_keys(js, "solver",
                        {"p", "lp", "k", "k_sweep", "oracle", "delta", "eps", "max_inner",
                         "cert_radius", "gap_probes", "fit_discard"});
    cfg.solver.p = require<int>(js, "solver", "p");
    if (cfg.solver.p < 1) throw ConfigError("solver.p: must be >= 1");
    if (js.contains("lp")) {
        cfg.solver.lp = require<double>(js, "solver", "lp");
        if (*cfg.solver.lp <= 0.0) throw ConfigError("solver.lp: must be > 0");
    }
    if (js.contains("k")) {
        cfg.solver.k = require<int>(js, "solver", "k");
        if (*cfg.solver.k < 0) throw ConfigError("solver.k: must be >= 0");
    }
    cfg.solver.k_sweep = get_or<std::vector<int>>(js, "solver", "k_sweep", {});
    cfg.solver.oracle = get_or<std::string>(js, "solver", "oracle", "p1-closed-form");
    if (cfg.solver.oracle != "p1-closed-form" && cfg.solver.oracle != "p2-bisection" &&
        cfg.solver.oracle != "generic-inner")
        throw ConfigError("solver.oracle: expected p1-closed-form, p2-bisection or generic-inner");
    if (js.contains("delta")) {
        cfg.solver.delta = require<double>(js, "solver", "delta");
        if (*cfg.solver.delta <= 0.0) throw ConfigError("solver.delta: must be > 0");
    }
    if (js.contains("eps")) {
        cfg.solver.eps = require<double>(js, "solver", "eps");
        if (*cfg.solver.eps <= 0.0) throw ConfigError("solver.eps: must be > 0");
    }
    cfg.solver.max_inner = get_or<int>(js, "solver", "max_inner", 10000);
    if (cfg.solver.max_inner < 1) throw ConfigError("solver.max_inner: must be >= 1");
    if (js.contains("cert_radius")) {
        cfg.solver.cert_radius = require<double>(js, "solver", "cert_radius");
        if (*cfg.solver.cert_radius <= 0.0)
            throw ConfigError("solver.cert_radius: must be > 0");
    }
    cfg.solver.gap_probes = get_or<int>(js, "solver", "gap_probes", 256);
    if (cfg.solver.gap_probes < 1) throw ConfigError("solver.gap_probes: must be >= 1");
    cfg.solver.fit_discard = get_or<int>(js, "solver", "fit_discard", 4);
    if (cfg.solver.fit_discard < 0) throw ConfigError("solver.fit_discard: must be >= 0");

    if (j.contains("output")) {
        const json jo = j.at("output");
        reject_unknown_keys(jo, "output", {"trace", "summary", "timings"});
        cfg.output.trace = get_or<std::string>(jo, "output", "trace", "trace.csv");
        cfg.output.summary = get_or<std::string>(jo, "output", "summary", "summary.json");
        cfg.output.timings = get_or<bool>(jo, "output", "timings", false);
    }
    return cfg;
}

std::string resolve_output_path(const std::string& path) {
    const char* dir = std::getenv("MVIOPT_OUT_DIR");
    if (!dir || *dir == '\0') return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(dir) / p).string();
}

/// Everything the driver needs about a built instance.
struct BuiltInstance {
    std::shared_ptr<Operator> op;
    ProxSetup prox = ProxSetup::euclidean();
    FeasibleSet set = FeasibleSet::whole_space(0);
    Vector x0;
    std::string gap_kind;
    // Measured gap of a candidate solution.
    std::function<double(const Vector&)> gap;
    // omega(reference, x0) for the guarantee bound; reference depends on the
    // instance (closed-form optimum, achieving vertex, Newton root).
    std::function<std::optional<double>(const Vector&)> omega_ref;
    std::optional<double> lower_bound;
};

BuiltInstance build_instance(const ExperimentConfig& cfg) {
    BuiltInstance built;
    const auto& ic = cfg.instance;
    if (ic.kind == "hard") {
        HardInstance inst = build_hard_instance(ic.t, ic.p, ic.lf, ic.la, ic.n.value_or(-1),
                                                ic.m.value_or(-1));
        built.op = inst.op;
        built.prox = inst.prox;
        built.set = inst.set;
        built.x0 = inst.set.center_point();
        built.gap_kind = "restricted";
        built.lower_bound = lower_bound_value(ic.t, ic.p, ic.lf, ic.la);
        auto op = inst.op;
        auto set = inst.set;
        const int probes = cfg.solver.gap_probes;
        const std::uint64_t seed = cfg.seed;
        Vector z_star = inst.z_star();
        built.gap = [op, set, probes, seed, z_star](const Vector& xhat) {
            double g = restricted_gap(xhat, *op, set, probes, seed ^ 0x9a7U);
            return std::max(g, op->value(z_star).dot(xhat - z_star));
        };
        ProxSetup prox = built.prox;
        Vector x0 = built.x0;
        built.omega_ref = [prox, x0, z_star](const Vector&) -> std::optional<double> {
            return prox.omega(z_star, x0);
        };
    } else if (ic.kind == "matrix-game") {
        CounterRng rng = CounterRng(cfg.seed).substream(1);
        DenseMatrix payoff(ic.rows, ic.cols);
        for (int r = 0; r < ic.rows; ++r)
            for (int c = 0; c < ic.cols; ++c)
                payoff(r, c) = rng.uniform(ic.entry_lo, ic.entry_hi);
        MatrixGame game = build_matrix_game(std::move(payoff));
        built.op = game.op;
        built.prox = game.prox;
        built.set = game.set;
        built.x0 = game.set.center_point();
        built.gap_kind = "exact-duality";
        auto op = game.op;
        built.gap = [op](const Vector& z) { return matrix_game_gap(op->payoff(), z); };
        ProxSetup prox = built.prox;
        Vector x0 = built.x0;
        built.omega_ref = [op, prox, x0](const Vector& z) -> std::optional<double> {
            return prox.omega(matrix_game_achieving_vertex(op->payoff(), z), x0);
        };
    } else {  // p2-synthetic
        auto op = build_p2_synthetic(ic.dim, ic.l2, ic.skew_scale,
                                     CounterRng(cfg.seed).substream(2).next_u64(), ic.mu);
        built.op = op;
        built.prox = ProxSetup::euclidean();
        built.set = FeasibleSet::whole_space(ic.dim);
        built.x0 = Vector::zeros(ic.dim);
        built.gap_kind = "restricted";
        const double radius = cfg.solver.cert_radius.value_or(5.0);
        const FeasibleSet ball = FeasibleSet::ball(Vector::zeros(ic.dim), radius);
        const int probes = cfg.solver.gap_probes;
        const std::uint64_t seed = cfg.seed;
        built.gap = [op, ball, probes, seed](const Vector& xhat) {
            return restricted_gap(xhat, *op, ball, probes, seed ^ 0x51bU);
        };
        ProxSetup prox = built.prox;
        Vector x0 = built.x0;
        const double mu = ic.mu;
        built.omega_ref = [op, prox, x0, mu](const Vector&) -> std::optional<double> {
            if (mu <= 0.0) return std::nullopt;
            return prox.omega(monotone_root(*op, Vector::zeros(op->dim())), x0);
        };
    }
    return built;
}

SolverConfig make_solver_config(const ExperimentConfig& cfg, const BuiltInstance& built,
                                int k) {
    SolverConfig sc;
    sc.p = cfg.solver.p;
    sc.lp = cfg.solver.lp.value_or(built.op->meta().lp);
    sc.iterations = k;
    if (cfg.solver.oracle == "p1-closed-form") sc.oracle = OracleKind::p1_closed_form;
    else if (cfg.solver.oracle == "p2-bisection") sc.oracle = OracleKind::p2_bisection;
    else sc.oracle = OracleKind::generic_inner;
    sc.delta = cfg.solver.delta;
    sc.target_eps = cfg.solver.eps;
    sc.max_inner = cfg.solver.max_inner;
    sc.mu = std::max(cfg.instance.mu, 1e-9);
    sc.prox = built.prox;
    sc.set = built.set;
    sc.x0 = built.x0;
    sc.cert_radius = cfg.solver.cert_radius;
    return sc;
}

json base_summary(const ExperimentConfig& cfg) {
    json s;
    s["version"] = kVersion;
    s["config_hash"] = fnv1a_hex(cfg.raw_bytes);
    s["seed"] = cfg.seed;
    s["instance"] = cfg.instance.kind;
    s["oracle"] = cfg.solver.oracle;
    s["trace_format"] = "mviopt-trace-v1";
    return s;
}

void add_bound_fields(json& s, const ExperimentConfig& cfg, const BuiltInstance& built,
                      const SolverConfig& sc, double final_gap, const Vector& xhat) {
    std::optional<double> omega = built.omega_ref(xhat);
    s["omega_reference"] = omega ? json(*omega) : json();
    double eps = 0.0;
    if (cfg.solver.eps) {
        eps = *cfg.solver.eps;
        s["eps"] = eps;
        s["eps_source"] = "config";
    } else if (final_gap > 0.0) {
        eps = final_gap;
        s["eps"] = eps;
        s["eps_source"] = "measured";
    }
    if (omega && eps > 0.0) {
        const bool approx = sc.oracle != OracleKind::p1_closed_form;
        s["theoretical_iteration_bound"] =
            theoretical_iteration_bound(sc.p, sc.lp, eps, *omega, approx);
    } else {
        s["theoretical_iteration_bound"] = json();
    }
    if (built.lower_bound) s["lower_bound_value"] = *built.lower_bound;
}

int guarded(const std::function<void()>& body, const char* what) {
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << what << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const InsufficientDataError& e) {
        std::cerr << what << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const SolverNonConvergence& e) {
        std::cerr << what << ": " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::ios_base::failure& e) {
        std::cerr << what << ": " << e.what() << "\n";
        return kExitIo;
    } catch (const std::runtime_error& e) {
        // Filesystem and rename failures surface as plain runtime errors.
        std::cerr << what << ": " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace

int run_experiment(const std::string& config_path) {
    return guarded(
        [&] {
            const ExperimentConfig cfg = parse_config(config_path);
            if (!cfg.solver.k)
                throw ConfigError("solver.k: required for 'run' (use 'sweep' for k_sweep)");
            const BuiltInstance built = build_instance(cfg);
            const SolverConfig sc = make_solver_config(cfg, built, *cfg.solver.k);

            SolverTrace trace;
            try {
                trace = run(*built.op, sc);
            } catch (SolverNonConvergence& e) {
                const std::string csv = trace_to_csv(e.partial_trace, cfg.output.timings);
                write_text_atomic(resolve_output_path(cfg.output.trace), csv);
                throw;
            }

            write_text_atomic(resolve_output_path(cfg.output.trace),
                              trace_to_csv(trace, cfg.output.timings));

            json s = base_summary(cfg);
            s["k"] = *cfg.solver.k;
            const double final_gap = built.gap(trace.x_hat);
            s["final_gap"] = final_gap;
            s["gap_kind"] = built.gap_kind;
            s["early_exact"] = trace.early_exact;
            s["oracle_calls"] = trace.oracle_calls;
            std::vector<std::pair<double, double>> series;
            for (const auto& rec : trace.records)
                series.emplace_back(static_cast<double>(rec.iter), rec.gap_estimate);
            try {
                s["fitted_exponent"] = fit_rate_exponent(series, cfg.solver.fit_discard);
            } catch (const InsufficientDataError&) {
                s["fitted_exponent"] = json();
            }
            add_bound_fields(s, cfg, built, sc, final_gap, trace.x_hat);
            write_text_atomic(resolve_output_path(cfg.output.summary), s.dump(2) + "\n");
        },
        "run");
}

int run_sweep(const std::string& config_path) {
    return guarded(
        [&] {
            const ExperimentConfig cfg = parse_config(config_path);
            if (cfg.solver.k_sweep.size() < 4)
                throw ConfigError("solver.k_sweep: needs at least 4 strictly increasing entries");
            for (std::size_t i = 0; i + 1 < cfg.solver.k_sweep.size(); ++i)
                if (cfg.solver.k_sweep[i] >= cfg.solver.k_sweep[i + 1])
                    throw ConfigError("solver.k_sweep: entries must be strictly increasing");
            if (cfg.solver.k_sweep.front() < 0)
                throw ConfigError("solver.k_sweep: entries must be >= 0");

            const BuiltInstance built = build_instance(cfg);
            std::vector<std::pair<double, double>> series;
            json runs = json::array();
            Vector last_xhat;
            for (int k : cfg.solver.k_sweep) {
                SolverConfig sc = make_solver_config(cfg, built, k);
                sc.keep_iterates = false;
                const SolverTrace trace = run(*built.op, sc);
                const double gap = built.gap(trace.x_hat);
                series.emplace_back(static_cast<double>(k), gap);
                json entry;
                entry["k"] = k;
                entry["gap"] = gap;
                const auto omega = built.omega_ref(trace.x_hat);
                entry["rate_certificate"] =
                    omega ? json(rate_certificate(sc.p, sc.lp, *omega, k)) : json();
                runs.push_back(entry);
                last_xhat = trace.x_hat;
            }

            std::string csv = "k,gap,rate_certificate\r\n";
            for (const auto& entry : runs) {
                csv += std::to_string(entry.at("k").get<int>());
                csv += ',';
                csv += format_g17(entry.at("gap").get<double>());
                csv += ',';
                csv += entry.at("rate_certificate").is_null()
                           ? std::string("")
                           : format_g17(entry.at("rate_certificate").get<double>());
                csv += "\r\n";
            }
            write_text_atomic(resolve_output_path(cfg.output.trace), csv);

            json s = base_summary(cfg);
            s["k_sweep"] = cfg.solver.k_sweep;
            s["runs"] = runs;
            const double final_gap = series.back().second;
            s["final_gap"] = final_gap;
            s["gap_kind"] = built.gap_kind;
            const int discard =
                std::min<int>(cfg.solver.fit_discard,
                              static_cast<int>(cfg.solver.k_sweep.size()) - 4);
            s["fitted_exponent"] = fit_rate_exponent(series, std::max(0, discard));
            const SolverConfig sc = make_solver_config(cfg, built, cfg.solver.k_sweep.back());
            add_bound_fields(s, cfg, built, sc, final_gap, last_xhat);
            write_text_atomic(resolve_output_path(cfg.output.summary), s.dump(2) + "\n");
        },
        "sweep");
}

std::string config_schema() {
    json s;
    s["schema_version"] = "integer (optional, must be 1)";
    s["seed"] = "unsigned 64-bit integer; the single source of randomness";
    s["instance"] = {
        {"kind", "hard | matrix-game | p2-synthetic"},
        {"t", "hard: construction parameter t >= 1 (instance index 2t+1)"},
        {"p", "hard: smoothness order, 2 or 3"},
        {"l_f", "hard: function smoothness scale (default 1)"},
        {"l_a", "hard: coupling scale, 0 <= l_a <= l_f (default 0)"},
        {"n", "hard: primal dimension (optional, default 4t+3)"},
        {"m", "hard: dual dimension (optional, default 2t+2)"},
        {"rows", "matrix-game: payoff rows"},
        {"cols", "matrix-game: payoff cols"},
        {"entry_lo", "matrix-game: uniform entry lower bound (default -1)"},
        {"entry_hi", "matrix-game: uniform entry upper bound (default 1)"},
        {"dim", "p2-synthetic: dimension"},
        {"l2", "p2-synthetic: Jacobian Lipschitz constant"},
        {"skew_scale", "p2-synthetic: scale of the skew part (default 1)"},
        {"mu", "p2-synthetic: strong monotonicity modulus (default 0)"}};
    s["solver"] = {
        {"p", "smoothness order the solver runs at"},
        {"lp", "override of the instance smoothness constant (optional)"},
        {"k", "iteration budget for 'run' (loop executes 0..k inclusive)"},
        {"k_sweep", "strictly increasing iteration budgets for 'sweep' (>= 4 entries)"},
        {"oracle", "p1-closed-form | p2-bisection | generic-inner"},
        {"delta", "oracle accuracy: certificate threshold (generic-inner) or "
                  "solution distance (p2-bisection); default eps/2 or oracle-specific"},
        {"eps", "target accuracy for reporting and delta defaults (optional)"},
        {"max_inner", "inner iteration cap for generic-inner (default 10000)"},
        {"cert_radius", "certification/gap ball radius for unconstrained runs"},
        {"gap_probes", "sample count for restricted gaps (default 256)"},
        {"fit_discard", "leading points dropped before rate fits (default 4, "
                        "clamped so at least 4 points remain)"}};
    s["output"] = {{"trace", "CSV path (per-iteration trace, or gap-vs-k for sweeps)"},
                   {"summary", "JSON summary path"},
                   {"timings", "write real wall times; off by default so reruns are "
                               "byte-identical"}};
    s["environment"] = {{"MVIOPT_OUT_DIR", "prefix applied to relative output paths"}};
    s["exit_codes"] = {{"0", "ok"},
                       {"2", "config/schema violation"},
                       {"3", "solver non-convergence (partial trace flushed)"},
                       {"4", "I/O failure"}};
    return s.dump(2) + "\n";
}

}  // namespace mviopt
