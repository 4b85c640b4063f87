#pragma once

#include <optional>

#include "mviopt/geometry.hpp"
#include "mviopt/operators.hpp"

namespace mviopt {

/// One regularized Taylor subproblem: expansion center, order, smoothness
/// constant, and the geometry it is solved in. References must outlive the
/// spec (specs are cheap per-iteration views, not owners).
struct SubproblemSpec {
    const Operator* op = nullptr;
    Vector center;                 // expansion point, must lie in the set
    int p = 1;
    double lp = 1.0;
    const ProxSetup* prox = nullptr;
    const FeasibleSet* set = nullptr;
    /// Certification region for non-compact sets. When absent, a default ball
    /// sized from the field at the center is used.
    std::optional<FeasibleSet> cert_region;

    void validate() const;
};

struct OracleResult {
    Vector solution;
    double delta_achieved = 0.0;
    int inner_iterations = 0;
};

/// The monotone field whose VI defines the subproblem:
/// T_{p-1}(y; center) + (2 L_p / p!) * omega(y, center)^((p-1)/2)
///                    * (grad d(y) - grad d(center)).
Vector subproblem_field(const SubproblemSpec& spec, const Vector& y);

/// Compact region the certificate is evaluated over: the feasible set itself
/// when compact, otherwise the spec's certification ball (or the default one).
FeasibleSet certification_region(const SubproblemSpec& spec);

/// sup_{x in region} <U(y), y - x>, the delta-slack of y as a subproblem
/// solution. Nonpositive (up to rounding) at an exact solution.
double subproblem_certificate(const SubproblemSpec& spec, const Vector& y);

/// Exact p=1 oracle: the subproblem VI is the optimality condition of a single
/// mirror step, argmin <g(center), y> + 2 L_1 omega(y, center).
OracleResult solve_p1(const SubproblemSpec& spec);

/// Generic delta-approximate oracle: extragradient on the subproblem field
/// with an adaptive step (halved on certificate stagnation), terminating when
/// the measured certificate drops below delta. Throws ConvergenceError with
/// the best iterate when max_inner is exhausted.
OracleResult solve_inner(const SubproblemSpec& spec, double delta, int max_inner = 10000);

}  // namespace mviopt
