#include "mviopt/operators.hpp"

#include <cmath>
#include <string>

namespace mviopt {

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

Vector Operator::value(const Vector& x) const {
    if (x.dim() != dim()) throw DomainError("Operator::value: dimension mismatch");
    Vector g = value_impl(x);
    g.assert_finite("Operator::value");
    return g;
}

DenseMatrix Operator::jacobian(const Vector& x) const {
    if (x.dim() != dim()) throw DomainError("Operator::jacobian: dimension mismatch");
    DenseMatrix j = jacobian_impl(x);
    j.assert_finite("Operator::jacobian");
    return j;
}

Vector Operator::derivative_contraction(const Vector& x, const Vector& h, int order) const {
    if (order < 1) throw UnsupportedOrderError("derivative_contraction: order must be >= 1");
    if (order > max_derivative_order())
        throw UnsupportedOrderError("derivative_contraction: order " + std::to_string(order) +
                                    " exceeds available derivatives");
    if (x.dim() != dim() || h.dim() != dim())
        throw DomainError("derivative_contraction: dimension mismatch");
    Vector v = contraction_impl(x, h, order);
    v.assert_finite("Operator::derivative_contraction");
    return v;
}

DenseMatrix Operator::jacobian_impl(const Vector&) const {
    throw UnsupportedOrderError("operator does not provide a Jacobian");
}

Vector Operator::contraction_impl(const Vector& x, const Vector& h, int order) const {
    if (order == 1) return jacobian_impl(x).matvec(h);
    throw UnsupportedOrderError("operator does not provide order-" + std::to_string(order) +
                                " contractions");
}

AffineOperator::AffineOperator(DenseMatrix m, Vector c, Meta meta) : m_(std::move(m)), c_(std::move(c)) {
    if (m_.rows() != c_.dim() || m_.cols() != c_.dim())
        throw ConfigError("AffineOperator: matrix must be square and match the offset");
    meta_ = meta;
}

Vector AffineOperator::value_impl(const Vector& x) const { return m_.matvec(x) + c_; }

DenseMatrix AffineOperator::jacobian_impl(const Vector&) const { return m_; }

Vector AffineOperator::contraction_impl(const Vector& x, const Vector& h, int order) const {
    if (order == 1) return m_.matvec(h);
    return Vector::zeros(x.dim());
}

CallableOperator::CallableOperator(int dim, int max_order, ValueFn value,
                                   ContractionFn contraction, Meta meta)
    : dim_(dim), max_order_(max_order), value_fn_(std::move(value)),
      contraction_fn_(std::move(contraction)) {
    meta_ = meta;
}

Vector CallableOperator::value_impl(const Vector& x) const { return value_fn_(x); }

Vector CallableOperator::contraction_impl(const Vector& x, const Vector& h, int order) const {
    if (!contraction_fn_)
        throw UnsupportedOrderError("CallableOperator: no contraction callable");
    return contraction_fn_(x, h, order);
}

DenseMatrix CallableOperator::jacobian_impl(const Vector& x) const {
    // Assemble column-by-column from order-1 contractions.
    const int n = dim_;
    DenseMatrix j(n, n);
    for (int col = 0; col < n; ++col) {
        Vector jc = contraction_impl(x, Vector::unit(n, col), 1);
        for (int row = 0; row < n; ++row) j(row, col) = jc[row];
    }
    return j;
}

Vector taylor_expand(const Operator& op, int order, const Vector& center,
                     const Vector& query) {
    if (order < 0) throw UnsupportedOrderError("taylor_expand: negative order");
    if (order > op.max_derivative_order())
        throw UnsupportedOrderError("taylor_expand: order exceeds available derivatives");
    if (center.dim() != op.dim() || query.dim() != op.dim())
        throw DomainError("taylor_expand: dimension mismatch");
    Vector result = op.value(center);
    if (order == 0) return result;
    const Vector h = query - center;
    for (int i = 1; i <= order; ++i) {
        Vector term = op.derivative_contraction(center, h, i);
        term *= 1.0 / factorial(i);
        result += term;
    }
    return result;
}

double taylor_remainder_norm(const Operator& op, const Vector& center,
                             const Vector& query, NormKind norm) {
    const int p = op.meta().p;
    Vector r = op.value(query) - taylor_expand(op, p - 1, center, query);
    return r.norm(dual(norm));
}

double directional_derivative_check(const Operator& op, int order, const Vector& x,
                                    const Vector& h, double fd_step) {
    if (fd_step <= 0.0) throw DomainError("directional_derivative_check: fd_step must be > 0");
    const Vector analytic = op.derivative_contraction(x, h, order);
    auto at = [&](double t) { return op.value(x + t * h); };
    Vector fd(x.dim());
    const double e = fd_step;
    switch (order) {
        case 1: {
            fd = at(e) - at(-e);
            fd *= 1.0 / (2.0 * e);
            break;
        }
        case 2: {
            fd = at(e) - 2.0 * at(0.0) + at(-e);
            fd *= 1.0 / (e * e);
            break;
        }
        case 3: {
            fd = at(2.0 * e) - 2.0 * at(e) + 2.0 * at(-e) - at(-2.0 * e);
            fd *= 1.0 / (2.0 * e * e * e);
            break;
        }
        default:
            throw UnsupportedOrderError("directional_derivative_check: order must be in 1..3");
    }
    return (analytic - fd).norm_inf();
}

}  // namespace mviopt
