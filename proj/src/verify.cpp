#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mviopt/diagnostics.hpp"
#include "mviopt/experiment.hpp"
#include "mviopt/instances.hpp"
#include "mviopt/oracles.hpp"
#include "mviopt/subp2.hpp"

namespace mviopt {

namespace {

using nlohmann::json;

struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool upper = true;  // pass iff value <= threshold (else value >= threshold)
    bool pass() const { return upper ? value <= threshold : value >= threshold; }
};

json to_json(const std::vector<Check>& checks) {
    json arr = json::array();
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name},
                       {"value", c.value},
                       {"threshold", c.threshold},
                       {"comparison", c.upper ? "<=" : ">="},
                       {"pass", c.pass()}});
    }
    return arr;
}

std::vector<Check> suite_bregman() {
    std::vector<Check> checks;
    CounterRng rng(0xb3e9U);
    const ProxSetup euc = ProxSetup::euclidean();
    const FeasibleSet ball = FeasibleSet::ball(Vector::zeros(6), 1.5);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Vector x = ball.sample(rng), y = ball.sample(rng), z = ball.sample(rng);
        worst = std::max(worst, bregman_three_point_residual(euc, x, y, z));
    }
    checks.push_back({"three-point residual, euclidean (1000 triples)", worst, 1e-9, true});

    const ProxSetup ent = ProxSetup::entropy();
    const FeasibleSet simplex = FeasibleSet::simplex(6);
    worst = 0.0;
    double worst_lb = 0.0;  // omega >= ||x-y||^2 violation
    for (int k = 0; k < 1000; ++k) {
        const Vector x = simplex.sample(rng), y = simplex.sample(rng), z = simplex.sample(rng);
        worst = std::max(worst, bregman_three_point_residual(ent, x, y, z));
        const double w = ent.omega(x, y);
        const double n1 = (x - y).norm1();
        worst_lb = std::max(worst_lb, n1 * n1 - w);
    }
    checks.push_back({"three-point residual, entropy (1000 triples)", worst, 1e-9, true});
    checks.push_back({"omega - ||x-y||_1^2 deficit, entropy (1000 pairs)", worst_lb, 1e-12, true});

    double worst_euc = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Vector x = ball.sample(rng), y = ball.sample(rng);
        worst_euc = std::max(worst_euc, (x - y).norm2sq() - euc.omega(x, y));
    }
    checks.push_back({"omega - ||x-y||_2^2 deficit, euclidean (1000 pairs)", worst_euc, 1e-12, true});
    return checks;
}

std::vector<Check> suite_tseng() {
    std::vector<Check> checks;
    CounterRng rng(0x75e9U);
    const ProxSetup euc = ProxSetup::euclidean();
    const FeasibleSet ball = FeasibleSet::ball(Vector::zeros(5), 2.0);
    const ProxSetup ent = ProxSetup::entropy();
    const FeasibleSet simplex = FeasibleSet::simplex(5);
    double worst = 0.0;
    for (int k = 0; k < 250; ++k) {
        {
            const Vector anchor = ball.sample(rng), probe = ball.sample(rng);
            Vector linear(5);
            for (int i = 0; i < 5; ++i) linear[i] = rng.uniform(-3.0, 3.0);
            worst = std::min(worst, tseng_inequality_check(euc, ball, anchor, linear, probe));
        }
        {
            const Vector anchor = simplex.sample(rng), probe = simplex.sample(rng);
            Vector linear(5);
            for (int i = 0; i < 5; ++i) linear[i] = rng.uniform(-3.0, 3.0);
            worst = std::min(worst, tseng_inequality_check(ent, simplex, anchor, linear, probe));
        }
    }
    checks.push_back({"prox inequality slack, min over 500 cases", worst, -1e-9, false});
    return checks;
}

std::vector<Check> suite_power_mean() {
    std::vector<Check> checks;
    CounterRng rng(0x9b0cU);
    int failures = 0;
    for (int k = 0; k < 10000; ++k) {
        const int t = 2 + static_cast<int>(rng.next_u64() % 30);
        std::vector<double> xi(static_cast<std::size_t>(t));
        double sum_sq = 0.0;
        for (auto& x : xi) {
            x = rng.uniform(1e-3, 2.0);
            sum_sq += x * x;
        }
        const double r = sum_sq * (1.0 + rng.next_double());
        const double q = 1.0 + static_cast<double>(rng.next_u64() % 3);
        if (!power_mean_check(xi, q, r)) ++failures;
    }
    checks.push_back({"power-mean failures over 10^4 sequences", static_cast<double>(failures),
                      0.0, true});
    return checks;
}

std::vector<Check> suite_hard_instance_kkt() {
    std::vector<Check> checks;
    double worst_feas = 0.0, worst_stat = 0.0, worst_zeta = 0.0, worst_norm = 0.0;
    for (int p : {2, 3}) {
        for (double la : {0.0, 1.0}) {
            for (int t = 1; t <= 10; ++t) {
                const HardInstance inst = build_hard_instance(t, p, 1.0, la);
                const auto& spec = inst.spec;
                const auto& opt = inst.optimum;
                const Vector resid = spec.a_mat.matvec(opt.x_star) - spec.b_vec;
                worst_feas = std::max(worst_feas, resid.norm_inf());
                const Vector stat =
                    inst.op->f_gradient(opt.x_star) + spec.a_mat.tmatvec(opt.y_star);
                worst_stat = std::max(worst_stat, stat.norm_inf());
                const double zeta = saddle_objective(inst, opt.x_star, opt.y_star);
                worst_zeta = std::max(worst_zeta, std::fabs(zeta - opt.zeta_star));
                worst_norm = std::max(worst_norm, opt.x_star.norm2sq() - spec.rx_sq);
            }
        }
    }
    checks.push_back({"||A x* - b||_inf, worst over t<=10, p in {2,3}", worst_feas, 1e-12, true});
    checks.push_back({"||grad f(x*) + A^T y*||_inf", worst_stat, 1e-10, true});
    checks.push_back({"|zeta(x*, y*) - zeta*|", worst_zeta, 1e-10, true});
    checks.push_back({"||x*||^2 - R_X^2 (must be <= 0)", worst_norm, 0.0, true});
    return checks;
}

std::vector<Check> suite_taylor_remainder() {
    std::vector<Check> checks;
    CounterRng seeds(0x7a91U);

    auto ratio_check = [&](const Operator& op, const FeasibleSet& region, int samples,
                           std::uint64_t seed, const std::string& name) {
        const double est = estimate_lp(op, op.meta().p, region, samples, seed);
        checks.push_back({name + " (sampled L_p ratio / declared)", est / op.meta().lp,
                          1.0 + 1e-9, true});
    };

    {
        CounterRng rng(seeds.next_u64());
        const int n = 6;
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
        Vector c(n);
        for (int i = 0; i < n; ++i) c[i] = rng.uniform(-1.0, 1.0);
        Operator::Meta meta;
        meta.p = 2;
        meta.lp = 1e-6;  // affine: remainder is exactly zero
        AffineOperator op(std::move(m), std::move(c), meta);
        const double est = estimate_lp(op, 2, FeasibleSet::ball(Vector::zeros(n), 2.0), 200,
                                       seeds.next_u64());
        checks.push_back({"affine operator second-order remainder", est, 1e-10, true});
    }
    {
        auto op = build_p2_synthetic(8, 2.0, 1.0, seeds.next_u64(), 0.1);
        ratio_check(*op, FeasibleSet::ball(Vector::zeros(8), 2.0), 1000, seeds.next_u64(),
                    "p2-synthetic");
    }
    for (int p : {2, 3}) {
        const HardInstance inst = build_hard_instance(2, p, 1.0, 1.0);
        ratio_check(*inst.op, inst.set, 1000, seeds.next_u64(),
                    "hard instance p=" + std::to_string(p));
    }
    {
        CounterRng rng(seeds.next_u64());
        DenseMatrix payoff(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) payoff(i, j) = rng.uniform(-1.0, 1.0);
        const MatrixGame game = build_matrix_game(std::move(payoff));
        ratio_check(*game.op, game.set, 1000, seeds.next_u64(), "matrix game p=1");
    }
    return checks;
}

std::vector<Check> suite_subproblem_cross() {
    std::vector<Check> checks;
    CounterRng seeds(0xcafeU);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        const int n = 6 + static_cast<int>(seeds.next_u64() % 24);
        auto op = build_p2_synthetic(n, 2.0, 0.0, seeds.next_u64(), 0.5);
        CounterRng rng(seeds.next_u64());
        Vector center(n);
        for (int i = 0; i < n; ++i) center[i] = rng.uniform(-1.0, 1.0);

        Subp2Config cfg;
        cfg.l2 = 2.0;
        cfg.delta = 1e-9;
        cfg.mu = 0.5;
        const Subp2Result direct = solve_second_order(*op, center, cfg);

        const ProxSetup prox = ProxSetup::euclidean();
        const FeasibleSet space = FeasibleSet::whole_space(n);
        SubproblemSpec spec{op.get(), center, 2, 2.0, &prox, &space, std::nullopt};
        const OracleResult inner = solve_inner(spec, 1e-8, 60000);
        worst = std::max(worst, (direct.oracle.solution - inner.solution).norm2());
    }
    checks.push_back({"bisection vs inner solver disagreement (5 seeds)", worst, 1e-5, true});
    return checks;
}

}  // namespace

int run_verify(const std::string& suite) {
    const std::map<std::string, std::function<std::vector<Check>()>> suites = {
        {"bregman", suite_bregman},
        {"tseng", suite_tseng},
        {"power-mean", suite_power_mean},
        {"hard-instance-kkt", suite_hard_instance_kkt},
        {"taylor-remainder", suite_taylor_remainder},
        {"subproblem-cross", suite_subproblem_cross},
    };

    std::vector<std::string> selected;
    if (suite == "all") {
        for (const auto& [name, fn] : suites) selected.push_back(name);
    } else if (suites.count(suite)) {
        selected.push_back(suite);
    } else {
        std::cerr << "verify: unknown suite '" << suite << "'\n";
        return kExitConfig;
    }

    json report;
    report["version"] = kVersion;
    bool all_pass = true;
    json suites_json = json::array();
    for (const auto& name : selected) {
        const std::vector<Check> checks = suites.at(name)();
        bool pass = true;
        for (const auto& c : checks) pass = pass && c.pass();
        all_pass = all_pass && pass;
        suites_json.push_back({{"suite", name}, {"pass", pass}, {"checks", to_json(checks)}});
    }
    report["suites"] = suites_json;
    report["pass"] = all_pass;
    std::cout << report.dump(2) << "\n";
    return all_pass ? kExitOk : 1;
}

}  // namespace mviopt
