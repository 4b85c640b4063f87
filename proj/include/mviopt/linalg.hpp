#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "mviopt/errors.hpp"

namespace mviopt {

enum class NormKind { euclidean, l1, linf };

/// Dual pairing: euclidean is self-dual, l1 and linf are dual to each other.
NormKind dual(NormKind k);

class Vector {
public:
    Vector() = default;
    explicit Vector(int dim) : v_(static_cast<std::size_t>(dim), 0.0) {}
    Vector(std::initializer_list<double> init) : v_(init) { assert_finite("Vector init"); }
    explicit Vector(std::vector<double> entries) : v_(std::move(entries)) {
        assert_finite("Vector ctor");
    }

    static Vector zeros(int dim) { return Vector(dim); }
    static Vector constant(int dim, double value);
    static Vector unit(int dim, int index);

    int dim() const { return static_cast<int>(v_.size()); }
    double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    const std::vector<double>& entries() const { return v_; }

    Vector& operator+=(const Vector& o);
    Vector& operator-=(const Vector& o);
    Vector& operator*=(double s);

    double dot(const Vector& o) const;
    double norm2() const;
    double norm2sq() const;
    double norm1() const;
    double norm_inf() const;
    double norm(NormKind k) const;

    Vector segment(int offset, int len) const;
    void set_segment(int offset, const Vector& part);

    /// Throws DomainError if any entry is NaN or infinite.
    void assert_finite(const char* context) const;

    bool operator==(const Vector& o) const { return v_ == o.v_; }

private:
    std::vector<double> v_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector a);

/// Row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    static DenseMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    Vector matvec(const Vector& x) const;
    Vector tmatvec(const Vector& x) const;  // A^T x
    DenseMatrix transpose() const;
    DenseMatrix& operator+=(const DenseMatrix& o);
    DenseMatrix& operator*=(double s);

    double max_abs() const;
    void assert_finite(const char* context) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

/// LU factorization with partial pivoting, for small dense solves
/// (Newton steps, inverse iteration). Throws SingularMatrixError.
class LuFactorization {
public:
    explicit LuFactorization(DenseMatrix a);
    Vector solve(const Vector& rhs) const;
    int dim() const { return n_; }

private:
    int n_;
    DenseMatrix lu_;
    std::vector<int> perm_;
};

/// Largest singular value estimate by power iteration on A^T A
/// (deterministic start vector).
double spectral_norm_estimate(const DenseMatrix& a, int iterations = 500);

/// Smallest eigenvalue of a symmetric matrix by inverse iteration with a
/// Gershgorin-based shift; Rayleigh-quotient convergence check.
double min_symmetric_eigenvalue(const DenseMatrix& sym, int iterations = 200,
                                double tol = 1e-8);

}  // namespace mviopt
