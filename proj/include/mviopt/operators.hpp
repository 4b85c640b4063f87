#pragma once

#include <functional>
#include <memory>

#include "mviopt/linalg.hpp"

namespace mviopt {

/// A vector field g : R^n -> R^n together with its directional-derivative
/// contractions and smoothness metadata (order p, constant L_p).
///
/// Contractions are exposed only in fully contracted form
/// D^k g(x)[h]^k (a vector); explicit derivative tensors are never formed.
/// All evaluations must be deterministic and re-entrant; instances are
/// immutable after construction.
class Operator {
public:
    struct Meta {
        int p = 1;           // smoothness order
        double lp = 1.0;     // Lipschitz constant of the (p-1)st derivative
        bool monotone = true;
        NormKind norm = NormKind::euclidean;
    };

    virtual ~Operator() = default;

    virtual int dim() const = 0;
    /// Highest k for which derivative_contraction(.., k) is available.
    virtual int max_derivative_order() const { return 1; }

    Vector value(const Vector& x) const;
    DenseMatrix jacobian(const Vector& x) const;
    /// D^order g(x)[h]^order for order >= 1.
    Vector derivative_contraction(const Vector& x, const Vector& h, int order) const;

    const Meta& meta() const { return meta_; }

protected:
    virtual Vector value_impl(const Vector& x) const = 0;
    virtual DenseMatrix jacobian_impl(const Vector& x) const;
    virtual Vector contraction_impl(const Vector& x, const Vector& h, int order) const;

    Meta meta_;
};

/// g(x) = M x + c. Jacobian constant, all contractions of order >= 2 vanish.
class AffineOperator : public Operator {
public:
    AffineOperator(DenseMatrix m, Vector c, Meta meta = {});

    int dim() const override { return c_.dim(); }
    int max_derivative_order() const override { return 3; }

protected:
    Vector value_impl(const Vector& x) const override;
    DenseMatrix jacobian_impl(const Vector& x) const override;
    Vector contraction_impl(const Vector& x, const Vector& h, int order) const override;

private:
    DenseMatrix m_;
    Vector c_;
};

/// Adapter for test-local operators given as callables.
class CallableOperator : public Operator {
public:
    using ValueFn = std::function<Vector(const Vector&)>;
    using ContractionFn = std::function<Vector(const Vector&, const Vector&, int)>;

    CallableOperator(int dim, int max_order, ValueFn value, ContractionFn contraction,
                     Meta meta = {});

    int dim() const override { return dim_; }
    int max_derivative_order() const override { return max_order_; }

protected:
    Vector value_impl(const Vector& x) const override;
    Vector contraction_impl(const Vector& x, const Vector& h, int order) const override;
    DenseMatrix jacobian_impl(const Vector& x) const override;

private:
    int dim_;
    int max_order_;
    ValueFn value_fn_;
    ContractionFn contraction_fn_;
};

/// Taylor expansion of the field around `center`, evaluated at `query`:
/// sum_{i=0..order} D^i g(center)[query-center]^i / i!.
Vector taylor_expand(const Operator& op, int order, const Vector& center,
                     const Vector& query);

/// || g(query) - T_{p-1}(query; center) ||_* in the dual of `norm`,
/// where p is the operator's declared smoothness order. Callers compare
/// against (L_p / p!) * ||query - center||^p.
double taylor_remainder_norm(const Operator& op, const Vector& center,
                             const Vector& query, NormKind norm);

/// Max-norm discrepancy between the analytic contraction D^order g(x)[h]^order
/// and a central finite-difference estimate with step `fd_step`.
double directional_derivative_check(const Operator& op, int order, const Vector& x,
                                    const Vector& h, double fd_step = 1e-4);

double factorial(int n);

}  // namespace mviopt
