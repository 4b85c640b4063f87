#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mviopt/geometry.hpp"
#include "mviopt/operators.hpp"

namespace mviopt {

/// Sampled lower bound on the operator's smoothness constant of order p:
/// p! * max over pairs of ||g(y) - T_{p-1}(y;x)||_* / ||y - x||^p.
double estimate_lp(const Operator& op, int p, const FeasibleSet& region, int samples,
                   std::uint64_t seed);

/// Least-squares slope of log(gap) against log(K+1). Nonpositive gaps are
/// skipped; fewer than 4 usable points raises InsufficientDataError.
/// `discard` drops leading (transient) points but never below 4 survivors.
double fit_rate_exponent(const std::vector<std::pair<double, double>>& series,
                         int discard = 0);

/// Power-mean lower bound: given sum xi^2 <= R, checks
/// sum xi^{-q} >= T^{q/2+1} / R^{q/2} (with relative slack 1e-12).
/// A violated premise raises DomainError.
bool power_mean_check(const std::vector<double>& xi, double q, double r);

struct MonotonicityAudit {
    double min_pairing = 0.0;  // min <g(x)-g(y), x-y> / ||x-y||^2 over pairs
    double min_sym_eig = 0.0;  // min eigenvalue of the symmetrized Jacobian
};

MonotonicityAudit monotonicity_audit(const Operator& op, const FeasibleSet& region,
                                     int pairs, std::uint64_t seed);

}  // namespace mviopt
