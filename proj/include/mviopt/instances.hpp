#pragma once

#include <cstdint>
#include <memory>

#include "mviopt/geometry.hpp"
#include "mviopt/operators.hpp"

namespace mviopt {

/// The hard saddle-point family at index s = 2t+1. The objective is
///   zeta(x, y) = f(x) + <A x - b, y>
/// with f built from the anti-triangular band matrix B, and Euclidean ball
/// constraints ||x||^2 <= 3 (t+1)^3, ||y||^2 <= t+1. Its optimum is known in
/// closed form.
struct HardInstanceSpec {
    int t = 1;       // construction parameter; the instance index is s = 2t+1
    int p = 2;
    double lf = 1.0;
    double la = 0.0;
    int n = 0;       // primal dimension (columns of A)
    int m = 0;       // dual dimension (rows of A)
    int s = 3;       // = 2t+1

    DenseMatrix b_band;   // B in R^{s x s}
    DenseMatrix a_mat;    // A = (L_A/p!) blockdiag(B, G) padded to m x n
    Vector b_vec;         // (L_A/p!) [1_s; 0]
    double rx_sq = 0.0;   // 3 (t+1)^3
    double ry_sq = 0.0;   // t+1
};

struct ClosedFormOptimum {
    Vector x_star;     // (s, s-1, ..., 1, 0, ...) in R^n
    Vector y_star;     // (1/2) [1_s; 0] in R^m
    double zeta_star;  // -((p/(p+1)) L_f + L_A/2) / p! * s
};

/// The monotone saddle field g(x, y) = (grad f(x) + A^T y, b - A x) on
/// Z = X x Y; the y block carries the sign that keeps the Jacobian's
/// symmetric part positive semidefinite.
class HardInstanceOperator : public Operator {
public:
    explicit HardInstanceOperator(HardInstanceSpec spec);

    int dim() const override { return spec_.n + spec_.m; }
    int max_derivative_order() const override { return spec_.p; }

    const HardInstanceSpec& spec() const { return spec_; }
    double f_value(const Vector& x) const;
    Vector f_gradient(const Vector& x) const;
    DenseMatrix f_hessian(const Vector& x) const;

protected:
    Vector value_impl(const Vector& z) const override;
    DenseMatrix jacobian_impl(const Vector& z) const override;
    Vector contraction_impl(const Vector& z, const Vector& h, int order) const override;

private:
    Vector apply_c(const Vector& x) const;    // C = blockdiag(B, I)
    Vector apply_ct(const Vector& u) const;   // C^T
    HardInstanceSpec spec_;
    double lin_coeff_;  // (L_f + L_A/2) / p!
};

struct HardInstance {
    HardInstanceSpec spec;
    std::shared_ptr<HardInstanceOperator> op;
    ClosedFormOptimum optimum;
    ProxSetup prox;    // Euclidean product
    FeasibleSet set;   // ball(R_X) x ball(R_Y)
    Vector z_star() const;
};

/// Builds the instance at index 2t+1. Defaults: m = 2t+2, n = 4t+3; callers
/// may widen both (m >= 2t+2 keeps the norm-filling block G = 2I nonempty).
HardInstance build_hard_instance(int t, int p, double lf, double la, int n = -1,
                                 int m = -1);

/// zeta(x, y) = f(x) + <A x - b, y>.
double saddle_objective(const HardInstance& inst, const Vector& x, const Vector& y);

/// Primal value f(x) + R_Y ||A x - b||_2 for feasible x.
double primal_value(const HardInstance& inst, const Vector& x);

/// The reference lower-bound value of the family at these parameters
/// (reported alongside measured gaps; never asserted against a solver).
double lower_bound_value(int t, int p, double lf, double la);

struct RestrictedMinima {
    double f_min = 0.0;          // min of f over the span of the first t coords
    double residual_min = 0.0;   // min of ||A x - b||_2 over the same span
    int iterations_f = 0;
    int iterations_residual = 0;
};

/// Numerically minimizes f and ||A x - b|| over the subspace of vectors
/// supported on the first t coordinates, by projected gradient descent with
/// step 1/(10 * local Lipschitz estimate).
RestrictedMinima restricted_minima(const HardInstance& inst, int max_iterations = 100000);

/// Bilinear game g(x, y) = (A^T y, -A x) on simplex x simplex with the
/// entropy product prox; L_1 = max |A_ij| in the (l1, linf) pairing.
class MatrixGameOperator : public Operator {
public:
    explicit MatrixGameOperator(DenseMatrix payoff);

    int dim() const override { return payoff_.cols() + payoff_.rows(); }
    int max_derivative_order() const override { return 3; }
    const DenseMatrix& payoff() const { return payoff_; }

protected:
    Vector value_impl(const Vector& z) const override;
    DenseMatrix jacobian_impl(const Vector& z) const override;
    Vector contraction_impl(const Vector& z, const Vector& h, int order) const override;

private:
    DenseMatrix payoff_;  // m x n: rows indexed by the maximizer
};

struct MatrixGame {
    std::shared_ptr<MatrixGameOperator> op;
    ProxSetup prox = ProxSetup::euclidean();
    FeasibleSet set = FeasibleSet::whole_space(0);
    double l1 = 0.0;
    int n = 0;  // minimizer simplex dimension
    int m = 0;  // maximizer simplex dimension
};

MatrixGame build_matrix_game(DenseMatrix payoff);

/// Exact duality gap max_i (A x)_i - min_j (A^T y)_j of a strategy pair.
double matrix_game_gap(const DenseMatrix& payoff, const Vector& z);

/// The vertex pair achieving the duality gap (used as a measured reference).
Vector matrix_game_achieving_vertex(const DenseMatrix& payoff, const Vector& z);

/// Unconstrained p=2 testbed: g(x) = S x + c + (L_2/2) |x| x + mu x with
/// S skew-symmetric. The Jacobian is exactly L_2-Lipschitz; mu > 0 gives the
/// strongly monotone variant.
class P2SyntheticOperator : public Operator {
public:
    P2SyntheticOperator(DenseMatrix skew, Vector offset, double l2, double mu);

    int dim() const override { return offset_.dim(); }
    int max_derivative_order() const override { return 2; }
    double mu() const { return mu_; }

protected:
    Vector value_impl(const Vector& x) const override;
    DenseMatrix jacobian_impl(const Vector& x) const override;
    Vector contraction_impl(const Vector& x, const Vector& h, int order) const override;

private:
    DenseMatrix skew_;
    Vector offset_;
    double l2_;
    double mu_;
};

std::shared_ptr<P2SyntheticOperator> build_p2_synthetic(int n, double l2,
                                                        double skew_scale,
                                                        std::uint64_t seed,
                                                        double mu = 0.0,
                                                        double offset_scale = 1.0);

/// Root of a strongly monotone operator (damped Newton); the reference
/// solution for unconstrained synthetic runs.
Vector monotone_root(const Operator& op, const Vector& start, int max_iterations = 100,
                     double tol = 1e-13);

}  // namespace mviopt
