#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mviopt {

/// Invalid or inconsistent configuration (bad pairing of prox and set,
/// missing required parameter, malformed experiment config).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Input outside the mathematical domain of an operation (anchor not in the
/// feasible set, infeasible evaluation point, nonpositive step).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// A derivative order beyond what an operator provides.
struct UnsupportedOrderError : std::runtime_error {
    explicit UnsupportedOrderError(const std::string& what) : std::runtime_error(what) {}
};

/// Gap certificates over an unbounded set without a certification ball.
struct UnboundedCertificateError : std::runtime_error {
    explicit UnboundedCertificateError(const std::string& what) : std::runtime_error(what) {}
};

/// Shifted quasi-triangular system is numerically singular.
struct SingularShiftError : std::runtime_error {
    explicit SingularShiftError(const std::string& what) : std::runtime_error(what) {}
};

struct SingularMatrixError : std::runtime_error {
    explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

/// Too few usable data points for a fit.
struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative solve exhausted its budget. Carries the best iterate seen and
/// the certificate it achieved so callers can inspect partial progress.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& what, std::vector<double> best, double certificate)
        : std::runtime_error(what), best_iterate(std::move(best)), best_certificate(certificate) {}
    std::vector<double> best_iterate;
    double best_certificate;
};

}  // namespace mviopt
