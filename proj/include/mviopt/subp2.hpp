#pragma once

#include <optional>

#include "mviopt/operators.hpp"
#include "mviopt/oracles.hpp"

namespace mviopt {

/// Configuration of the unconstrained Euclidean p=2 subproblem solver.
/// mu is a modulus: x^T (grad F(center)) x >= mu ||x||^2 must hold, so the
/// resolvent bound ||(grad F + lambda I)^{-1}|| <= 1/(mu + lambda) applies.
/// gamma/lambda_cap/pi are optional iterate-path bounds used only when
/// reporting the gap-error coefficient.
struct Subp2Config {
    double l2 = 1.0;
    double delta = 1e-10;  // accuracy of the solution, ||T~ - T|| <= delta
    double mu = 1e-6;
    /// Estimate the smallest eigenvalue of the symmetrized Jacobian by inverse
    /// iteration and warn on stderr when the supplied mu overstates it.
    bool check_mu = false;
    std::optional<double> gamma;       // bound on ||grad U at the solution||
    std::optional<double> lambda_cap;  // bound on ||half-iterate - next iterate||
    std::optional<double> pi;          // bound on ||F(center)||

    void validate() const;
};

/// One-time real Schur reduction of the Jacobian at the expansion center;
/// solves (grad F + lambda I) s = F(center) for many shifts by quadratic-cost
/// back substitution on the quasi-upper-triangular factor.
class ShiftedSolver {
public:
    ShiftedSolver(const DenseMatrix& jacobian, Vector field_at_center);

    /// s(lambda) = (grad F + lambda I)^{-1} F(center). Throws
    /// SingularShiftError when the shifted system is numerically singular.
    Vector solve(double lambda) const;

    const DenseMatrix& orthogonal_factor() const { return q_; }
    const DenseMatrix& quasi_triangular_factor() const { return r_; }
    const Vector& field_at_center() const { return field_; }

private:
    int n_;
    DenseMatrix q_;      // orthogonal
    DenseMatrix r_;      // quasi upper triangular, blocks of size <= 2
    Vector field_;       // F(center)
    Vector qt_field_;    // Q^T F(center), cached
};

struct Subp2Result {
    OracleResult oracle;
    double lambda = 0.0;       // accepted shift
    int bisection_solves = 0;  // shifted solves performed
};

/// Bisection solver for the p=2 unconstrained Euclidean subproblem. Finds the
/// root of psi(lambda) = 2 L_2 ||s(lambda)|| - lambda to bracket width
/// nu = delta mu^2 / ||F(center)|| and returns center - s(lambda), which is
/// within delta of the exact subproblem solution.
Subp2Result solve_second_order(const Operator& op, const Vector& center,
                               const Subp2Config& cfg);

/// Per-unit-distance gap coefficient delta * (L_2 / 2 + gamma): multiplied by
/// ||T~ - x||, it bounds the VI slack of the returned point. Requires gamma.
double gap_error_coefficient(const Subp2Config& cfg);

/// The delta that makes the subproblem's gap slack equal eps/2 given the path
/// bounds lambda_cap and gamma.
double delta_for_target_eps(const Subp2Config& cfg, double eps);

}  // namespace mviopt
