#include "mviopt/subp2.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#define EIGEN_DONT_PARALLELIZE
#include <Eigen/Dense>

namespace mviopt {

void Subp2Config::validate() const {
    if (l2 <= 0.0) throw ConfigError("Subp2Config: L_2 must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("Subp2Config: delta must be in (0,1)");
    if (mu <= 0.0) throw ConfigError("Subp2Config: mu must be > 0");
}

ShiftedSolver::ShiftedSolver(const DenseMatrix& jacobian, Vector field_at_center)
    : n_(jacobian.rows()), field_(std::move(field_at_center)) {
    if (jacobian.rows() != jacobian.cols())
        throw ConfigError("ShiftedSolver: Jacobian must be square");
    if (field_.dim() != n_) throw ConfigError("ShiftedSolver: field dimension mismatch");

    Eigen::MatrixXd a(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) a(i, j) = jacobian(i, j);
    Eigen::RealSchur<Eigen::MatrixXd> schur(a);
    if (schur.info() != Eigen::Success)
        throw SingularShiftError("ShiftedSolver: Schur reduction failed");

    q_ = DenseMatrix(n_, n_);
    r_ = DenseMatrix(n_, n_);
    const Eigen::MatrixXd& u = schur.matrixU();
    const Eigen::MatrixXd& t = schur.matrixT();
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            q_(i, j) = u(i, j);
            r_(i, j) = t(i, j);
        }
    }
    qt_field_ = q_.tmatvec(field_);
}

Vector ShiftedSolver::solve(double lambda) const {
    if (lambda < 0.0) throw DomainError("ShiftedSolver::solve: lambda must be >= 0");
    // Back substitution on (R + lambda I) with 1x1 and 2x2 diagonal blocks.
    Vector x(n_);
    const double singular_tol = 1e-14 * std::max(1.0, r_.max_abs() + lambda);
    int i = n_ - 1;
    while (i >= 0) {
        const bool block2 = (i > 0) && (r_(i, i - 1) != 0.0);
        if (block2) {
            double b0 = qt_field_[i - 1];
            double b1 = qt_field_[i];
            for (int j = i + 1; j < n_; ++j) {
                b0 -= r_(i - 1, j) * x[j];
                b1 -= r_(i, j) * x[j];
            }
            const double a00 = r_(i - 1, i - 1) + lambda;
            const double a01 = r_(i - 1, i);
            const double a10 = r_(i, i - 1);
            const double a11 = r_(i, i) + lambda;
            const double det = a00 * a11 - a01 * a10;
            if (std::fabs(det) <= singular_tol * singular_tol)
                throw SingularShiftError("ShiftedSolver: singular 2x2 block (mu assumption violated?)");
            x[i - 1] = (b0 * a11 - a01 * b1) / det;
            x[i] = (a00 * b1 - a10 * b0) / det;
            i -= 2;
        } else {
            double b = qt_field_[i];
            for (int j = i + 1; j < n_; ++j) b -= r_(i, j) * x[j];
            const double d = r_(i, i) + lambda;
            if (std::fabs(d) <= singular_tol)
                throw SingularShiftError("ShiftedSolver: singular pivot (mu assumption violated?)");
            x[i] = b / d;
            --i;
        }
    }
    Vector s = q_.matvec(x);
    s.assert_finite("ShiftedSolver::solve");
    return s;
}

Subp2Result solve_second_order(const Operator& op, const Vector& center,
                               const Subp2Config& cfg) {
    cfg.validate();
    const Vector field = op.value(center);
    const double fnorm = field.norm2();

    Subp2Result result;
    if (fnorm == 0.0) {
        // Zero field: the center is already the exact subproblem solution.
        result.oracle = OracleResult{center, 0.0, 0};
        result.lambda = 0.0;
        return result;
    }

    const DenseMatrix jac = op.jacobian(center);
    if (cfg.check_mu) {
        const int n = jac.rows();
        DenseMatrix sym(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) sym(a, b) = 0.5 * (jac(a, b) + jac(b, a));
        const double est = min_symmetric_eigenvalue(sym);
        if (cfg.mu > est * (1.0 + 1e-6) + 1e-12)
            std::fprintf(stderr,
                         "solve_second_order: supplied mu %.3e exceeds the estimated "
                         "symmetric-Jacobian minimum %.3e\n",
                         cfg.mu, est);
    }
    const ShiftedSolver solver(jac, field);
    int solves = 0;
    Vector s_hi, s_mid;
    auto psi = [&](double lambda, Vector& s_out) {
        ++solves;
        s_out = solver.solve(lambda);
        return 2.0 * cfg.l2 * s_out.norm2() - lambda;
    };

    // psi is strictly decreasing with psi(0) > 0; bracket [0, hi] with
    // psi(hi) <= 0, then bisect to width nu = delta mu^2 / ||F||. The solve
    // at the upper end is cached so the accepted shift costs no extra solve.
    const double nu = cfg.delta * cfg.mu * cfg.mu / fnorm;
    double lo = 0.0;
    double hi = fnorm / cfg.delta;
    while (psi(hi, s_hi) > 0.0) hi *= 2.0;

    while (hi - lo > nu && hi > nu) {
        const double mid = 0.5 * (lo + hi);
        if (psi(mid, s_mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
            s_hi = s_mid;
        }
    }

    result.oracle.solution = center - s_hi;
    result.oracle.delta_achieved = cfg.delta;
    result.oracle.inner_iterations = solves;
    result.lambda = hi;
    result.bisection_solves = solves;
    return result;
}

double gap_error_coefficient(const Subp2Config& cfg) {
    if (!cfg.gamma) throw ConfigError("gap_error_coefficient: gamma bound required");
    return cfg.delta * (0.5 * cfg.l2 + *cfg.gamma);
}

double delta_for_target_eps(const Subp2Config& cfg, double eps) {
    if (!cfg.gamma || !cfg.lambda_cap)
        throw ConfigError("delta_for_target_eps: gamma and lambda_cap bounds required");
    if (eps <= 0.0) throw ConfigError("delta_for_target_eps: eps must be > 0");
    return eps / (2.0 * (*cfg.lambda_cap) * (cfg.l2 + *cfg.gamma));
}

}  // namespace mviopt
