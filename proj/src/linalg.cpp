#include "mviopt/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "mviopt/kernels.hpp"

namespace mviopt {

NormKind dual(NormKind k) {
    switch (k) {
        case NormKind::euclidean: return NormKind::euclidean;
        case NormKind::l1: return NormKind::linf;
        case NormKind::linf: return NormKind::l1;
    }
    throw ConfigError("dual: unknown norm kind");
}

Vector Vector::constant(int dim, double value) {
    Vector v(dim);
    std::fill(v.v_.begin(), v.v_.end(), value);
    v.assert_finite("Vector::constant");
    return v;
}

Vector Vector::unit(int dim, int index) {
    if (index < 0 || index >= dim) throw DomainError("Vector::unit: index out of range");
    Vector v(dim);
    v[index] = 1.0;
    return v;
}

Vector& Vector::operator+=(const Vector& o) {
    if (o.dim() != dim()) throw DomainError("Vector +=: dimension mismatch");
    kern::axpy(data(), 1.0, o.data(), v_.size());
    assert_finite("Vector +=");
    return *this;
}

Vector& Vector::operator-=(const Vector& o) {
    if (o.dim() != dim()) throw DomainError("Vector -=: dimension mismatch");
    kern::axpy(data(), -1.0, o.data(), v_.size());
    assert_finite("Vector -=");
    return *this;
}

Vector& Vector::operator*=(double s) {
    kern::scal(data(), s, v_.size());
    assert_finite("Vector *=");
    return *this;
}

double Vector::dot(const Vector& o) const {
    if (o.dim() != dim()) throw DomainError("Vector::dot: dimension mismatch");
    return kern::dot(data(), o.data(), v_.size());
}

double Vector::norm2sq() const { return kern::nrm2sq(data(), v_.size()); }
double Vector::norm2() const { return std::sqrt(norm2sq()); }
double Vector::norm1() const { return kern::nrm1(data(), v_.size()); }
double Vector::norm_inf() const { return kern::nrminf(data(), v_.size()); }

double Vector::norm(NormKind k) const {
    switch (k) {
        case NormKind::euclidean: return norm2();
        case NormKind::l1: return norm1();
        case NormKind::linf: return norm_inf();
    }
    throw ConfigError("Vector::norm: unknown norm kind");
}

Vector Vector::segment(int offset, int len) const {
    if (offset < 0 || len < 0 || offset + len > dim())
        throw DomainError("Vector::segment: range out of bounds");
    Vector out(len);
    std::copy(v_.begin() + offset, v_.begin() + offset + len, out.v_.begin());
    return out;
}

void Vector::set_segment(int offset, const Vector& part) {
    if (offset < 0 || offset + part.dim() > dim())
        throw DomainError("Vector::set_segment: range out of bounds");
    std::copy(part.v_.begin(), part.v_.end(), v_.begin() + offset);
}

void Vector::assert_finite(const char* context) const {
    for (double x : v_) {
        if (!std::isfinite(x))
            throw DomainError(std::string(context) + ": non-finite entry");
    }
}

Vector operator+(Vector a, const Vector& b) {
    a += b;
    return a;
}

Vector operator-(Vector a, const Vector& b) {
    a -= b;
    return a;
}

Vector operator*(double s, Vector a) {
    a *= s;
    return a;
}

DenseMatrix DenseMatrix::identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vector DenseMatrix::matvec(const Vector& x) const {
    if (x.dim() != cols_) throw DomainError("DenseMatrix::matvec: dimension mismatch");
    Vector y(rows_);
    kern::gemv(data(), x.data(), y.data(), rows_, cols_);
    y.assert_finite("DenseMatrix::matvec");
    return y;
}

Vector DenseMatrix::tmatvec(const Vector& x) const {
    if (x.dim() != rows_) throw DomainError("DenseMatrix::tmatvec: dimension mismatch");
    Vector y(cols_);
    kern::gemv_t(data(), x.data(), y.data(), rows_, cols_);
    y.assert_finite("DenseMatrix::tmatvec");
    return y;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_)
        throw DomainError("DenseMatrix +=: shape mismatch");
    kern::axpy(data(), 1.0, o.data(), a_.size());
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
    kern::scal(data(), s, a_.size());
    return *this;
}

double DenseMatrix::max_abs() const { return kern::nrminf(data(), a_.size()); }

void DenseMatrix::assert_finite(const char* context) const {
    for (double x : a_) {
        if (!std::isfinite(x))
            throw DomainError(std::string(context) + ": non-finite entry");
    }
}

LuFactorization::LuFactorization(DenseMatrix a) : n_(a.rows()), lu_(std::move(a)) {
    if (lu_.rows() != lu_.cols()) throw DomainError("LuFactorization: matrix not square");
    perm_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) perm_[static_cast<std::size_t>(i)] = i;
    for (int k = 0; k < n_; ++k) {
        int piv = k;
        double best = std::fabs(lu_(k, k));
        for (int i = k + 1; i < n_; ++i) {
            const double v = std::fabs(lu_(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == 0.0) throw SingularMatrixError("LuFactorization: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(piv, j));
            std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(piv)]);
        }
        const double d = lu_(k, k);
        for (int i = k + 1; i < n_; ++i) {
            const double f = lu_(i, k) / d;
            lu_(i, k) = f;
            for (int j = k + 1; j < n_; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
}

Vector LuFactorization::solve(const Vector& rhs) const {
    if (rhs.dim() != n_) throw DomainError("LuFactorization::solve: dimension mismatch");
    Vector x(n_);
    for (int i = 0; i < n_; ++i) x[i] = rhs[perm_[static_cast<std::size_t>(i)]];
    for (int i = 1; i < n_; ++i) {
        double r = x[i];
        for (int j = 0; j < i; ++j) r -= lu_(i, j) * x[j];
        x[i] = r;
    }
    for (int i = n_ - 1; i >= 0; --i) {
        double r = x[i];
        for (int j = i + 1; j < n_; ++j) r -= lu_(i, j) * x[j];
        x[i] = r / lu_(i, i);
    }
    x.assert_finite("LuFactorization::solve");
    return x;
}

double spectral_norm_estimate(const DenseMatrix& a, int iterations) {
    const int n = a.cols();
    if (n == 0 || a.rows() == 0) return 0.0;
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = 1.0 / std::sqrt(static_cast<double>(n) + i);
    double sigma = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Vector w = a.tmatvec(a.matvec(v));
        const double nw = w.norm2();
        if (nw == 0.0) return 0.0;
        w *= 1.0 / nw;
        sigma = std::sqrt(nw);
        v = w;
    }
    return sigma;
}

double min_symmetric_eigenvalue(const DenseMatrix& sym, int iterations, double tol) {
    const int n = sym.rows();
    if (n != sym.cols()) throw DomainError("min_symmetric_eigenvalue: matrix not square");
    // Shift below the Gershgorin lower bound so the eigenvalue nearest the
    // shift is the smallest one.
    double lower = 0.0;
    for (int i = 0; i < n; ++i) {
        double offdiag = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) offdiag += std::fabs(sym(i, j));
        lower = std::min(lower, sym(i, i) - offdiag);
    }
    const double shift = lower - 1.0;
    DenseMatrix shifted = sym;
    for (int i = 0; i < n; ++i) shifted(i, i) -= shift;
    LuFactorization lu(shifted);

    Vector q(n);
    for (int i = 0; i < n; ++i) q[i] = 1.0 / std::sqrt(static_cast<double>(n + i + 1));
    q *= 1.0 / q.norm2();
    double rayleigh = q.dot(sym.matvec(q));
    for (int it = 0; it < iterations; ++it) {
        Vector z = lu.solve(q);
        const double nz = z.norm2();
        if (nz == 0.0) break;
        z *= 1.0 / nz;
        const double next = z.dot(sym.matvec(z));
        q = z;
        if (std::fabs(next - rayleigh) <= tol * std::max(1.0, std::fabs(next))) {
            rayleigh = next;
            break;
        }
        rayleigh = next;
    }
    return rayleigh;
}

}  // namespace mviopt
