#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mviopt/oracles.hpp"
#include "mviopt/subp2.hpp"

namespace mviopt {

enum class OracleKind { p1_closed_form, p2_bisection, generic_inner };

/// Configuration of an outer solver run. `delta` is oracle-specific:
/// the certificate threshold for the generic inner oracle, and the solution
/// accuracy ||T~ - T|| for the p=2 bisection oracle. When target_eps is set
/// and delta is not, the generic oracle uses delta = eps / 2.
struct SolverConfig {
    int p = 1;
    double lp = 1.0;
    int iterations = 100;  // the loop runs 0..iterations inclusive
    OracleKind oracle = OracleKind::p1_closed_form;
    std::optional<double> delta;
    std::optional<double> target_eps;
    int max_inner = 10000;
    double mu = 1e-6;  // modulus passed to the p2 bisection oracle
    ProxSetup prox = ProxSetup::euclidean();
    FeasibleSet set = FeasibleSet::whole_space(0);
    Vector x0;
    /// Certification/gap-reporting ball radius for non-compact sets.
    std::optional<double> cert_radius;
    bool keep_iterates = true;  // store x_i and the half iterate per record

    double oracle_delta() const;
    void validate(const Operator& op) const;
};

struct IterationRecord {
    int iter = 0;
    double lambda = 0.0;
    double omega_step = 0.0;
    double oracle_delta = 0.0;
    int inner_iterations = 0;
    double gap_estimate = 0.0;  // strong gap of the running average
    double wall_ms = 0.0;
    Vector x;
    Vector x_half;
};

struct SolverTrace {
    std::vector<IterationRecord> records;
    Vector x_hat;            // lambda-weighted average of half iterates
    double lambda_sum = 0.0;
    bool early_exact = false;  // a degenerate prox step flagged x_i as exact
    int oracle_calls = 0;
};

/// Oracle failure mid-run; carries the trace accumulated so far so callers
/// can flush partial results.
struct SolverNonConvergence : std::runtime_error {
    SolverNonConvergence(const std::string& what, SolverTrace partial, double certificate)
        : std::runtime_error(what), partial_trace(std::move(partial)),
          best_certificate(certificate) {}
    SolverTrace partial_trace;
    double best_certificate;
};

/// lambda_i = omega_step^{-(p-1)/2} / 2; independent of omega_step for p = 1.
double lambda_schedule(double omega_step, int p);

/// Runs iterations 0..K of the outer loop: oracle solve, step weight from the
/// prox distance of the half step, mirror step with alpha = L_p/(p! lambda).
/// Returns the weighted average of the half iterates (accumulated with
/// compensated summation) and the full trace.
SolverTrace run(const Operator& op, const SolverConfig& cfg);

/// Oracle-call bound to reach gap <= eps from omega(x, x0) = omega0:
/// (16/15) (c L_p / p!)^{2/(p+1)} omega0 / eps^{2/(p+1)}, with c = 2 for
/// exact oracles and c = 4 for delta-approximate ones.
double theoretical_iteration_bound(int p, double lp, double eps, double omega0,
                                   bool approximate);

/// Gap certificate after K+1 iterations:
/// (2 L_p / p!) (16/15)^{(p-1)/2} omega^{(p+1)/2} / (K+1)^{(p+1)/2}.
double rate_certificate(int p, double lp, double omega_ref, int k);

/// Slack of the per-run telescoping inequality at a feasible reference point:
/// sum_i lambda_i (p!/L_p) <g(x_half_i), x_half_i - ref>
///   + (15/16) sum_i omega_step_i - omega(ref, x0) - (p!/L_p) delta (K+1).
/// Guaranteed nonpositive (up to oracle slack and rounding).
double telescoping_slack(const SolverTrace& trace, const Vector& reference,
                         const Operator& op, const SolverConfig& cfg);

/// Sampled restricted gap max_{x in probes} <g(x), x_hat - x> over a compact
/// set; probes combine seeded uniform samples with deterministic line probes
/// along the field at x_hat.
double restricted_gap(const Vector& x_hat, const Operator& op, const FeasibleSet& set,
                      int probes, std::uint64_t seed);

}  // namespace mviopt
