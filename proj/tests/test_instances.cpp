#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "mviopt/diagnostics.hpp"
#include "mviopt/instances.hpp"
#include "mviopt/rng.hpp"

using namespace mviopt;

namespace {

double eigen_spectral_norm(const DenseMatrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e.jacobiSvd().singularValues()(0);
}

// Independent re-implementation of the saddle objective used as the
// duplicate-formula oracle.
double zeta_duplicate(const HardInstance& inst, const Vector& x, const Vector& y) {
    const auto& spec = inst.spec;
    const int s = spec.s;
    double acc = 0.0;
    for (int i = 0; i < s; ++i) {
        double row = 0.0;
        for (int j = 0; j < s; ++j) row += spec.b_band(i, j) * x[j];
        acc += std::pow(std::fabs(row), spec.p + 1);
    }
    for (int i = s; i < spec.n; ++i) acc += std::pow(std::fabs(x[i]), spec.p + 1);
    double f = spec.lf / factorial(spec.p + 1) * acc -
               (spec.lf + 0.5 * spec.la) / factorial(spec.p) * x[0];
    double coupling = 0.0;
    for (int i = 0; i < spec.m; ++i) {
        double axi = 0.0;
        for (int j = 0; j < spec.n; ++j) axi += spec.a_mat(i, j) * x[j];
        coupling += (axi - spec.b_vec[i]) * y[i];
    }
    return f + coupling;
}

}  // namespace

TEST_CASE("t=1, p=2 hard instance matches the worked example") {
    const HardInstance inst = build_hard_instance(1, 2, 1.0, 1.0);
    const auto& spec = inst.spec;
    REQUIRE(spec.s == 3);

    // B_3 rows: (0,0,1), (0,1,-1), (1,-1,0)
    const double expect[3][3] = {{0, 0, 1}, {0, 1, -1}, {1, -1, 0}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(spec.b_band(i, j) == expect[i][j]);

    // x* = (3, 2, 1, 0, ...) and B x*_{1..3} = (1, 1, 1)
    CHECK(inst.optimum.x_star[0] == 3.0);
    CHECK(inst.optimum.x_star[1] == 2.0);
    CHECK(inst.optimum.x_star[2] == 1.0);
    for (int i = 3; i < spec.n; ++i) CHECK(inst.optimum.x_star[i] == 0.0);
    const Vector bx = spec.b_band.matvec(inst.optimum.x_star.segment(0, 3));
    for (int i = 0; i < 3; ++i) CHECK(bx[i] == doctest::Approx(1.0));

    // y* = (1/2)(1,1,1,0,...) and zeta* = -(2/3 + 1/2)/2 * 3 = -1.75
    for (int i = 0; i < 3; ++i) CHECK(inst.optimum.y_star[i] == 0.5);
    CHECK(inst.optimum.zeta_star == doctest::Approx(-1.75).epsilon(1e-15));
    CHECK(saddle_objective(inst, inst.optimum.x_star, inst.optimum.y_star) ==
          doctest::Approx(-1.75).epsilon(1e-12));
}

TEST_CASE("closed-form optimum satisfies the first-order conditions") {
    for (int p : {2, 3}) {
        for (double la : {0.0, 1.0}) {
            for (int t : {1, 2, 5, 10, 20}) {
                const HardInstance inst = build_hard_instance(t, p, 1.0, la);
                const auto& spec = inst.spec;
                const auto& opt = inst.optimum;

                // A x* = b exactly
                const Vector resid = spec.a_mat.matvec(opt.x_star) - spec.b_vec;
                CHECK(resid.norm_inf() <= 1e-12);
                // grad f(x*) + A^T y* = 0
                const Vector stat = inst.op->f_gradient(opt.x_star) +
                                    spec.a_mat.tmatvec(opt.y_star);
                CHECK(stat.norm_inf() <= 1e-10);
                // feasibility of the optimum
                CHECK(opt.x_star.norm2sq() <= spec.rx_sq);
                CHECK(opt.y_star.norm2sq() <= spec.ry_sq);
                CHECK(inst.set.contains(inst.z_star(), 1e-9));
            }
        }
    }
}

TEST_CASE("t=2 norm arithmetic: ||x*||^2 = 55 <= 81") {
    const HardInstance inst = build_hard_instance(2, 2, 1.0, 0.0);
    CHECK(inst.optimum.x_star.norm2sq() == doctest::Approx(55.0));
    CHECK(inst.spec.rx_sq == doctest::Approx(81.0));
}

TEST_CASE("zeta values") {
    const HardInstance inst = build_hard_instance(2, 2, 1.0, 1.0);
    SUBCASE("zero point gives f(0) = 0") {
        CHECK(saddle_objective(inst, Vector::zeros(inst.spec.n), Vector::zeros(inst.spec.m)) ==
              doctest::Approx(0.0));
    }
    SUBCASE("random points match the duplicate formula") {
        CounterRng rng(3);
        for (int trial = 0; trial < 50; ++trial) {
            Vector x(inst.spec.n), y(inst.spec.m);
            for (int i = 0; i < inst.spec.n; ++i) x[i] = rng.uniform(-2.0, 2.0);
            for (int i = 0; i < inst.spec.m; ++i) y[i] = rng.uniform(-2.0, 2.0);
            const double a = saddle_objective(inst, x, y);
            const double b = zeta_duplicate(inst, x, y);
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
    }
}

TEST_CASE("primal value") {
    const HardInstance inst = build_hard_instance(1, 2, 1.0, 1.0);
    const auto& spec = inst.spec;

    SUBCASE("at x* the constraint term vanishes and f(x*) = zeta*") {
        CHECK(primal_value(inst, inst.optimum.x_star) ==
              doctest::Approx(inst.optimum.zeta_star).epsilon(1e-12));
    }
    SUBCASE("at zero the value is R_Y ||b||") {
        const double expect =
            std::sqrt(spec.ry_sq) * (spec.la / factorial(spec.p)) * std::sqrt(1.0 * spec.s);
        CHECK(primal_value(inst, Vector::zeros(spec.n)) == doctest::Approx(expect));
    }
    SUBCASE("matches zeta maximized over the dual ball") {
        CounterRng rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            Vector x(spec.n);
            for (int i = 0; i < spec.n; ++i) x[i] = rng.uniform(-1.0, 1.0);
            const Vector resid = spec.a_mat.matvec(x) - spec.b_vec;
            const double rn = resid.norm2();
            double maximized;
            if (rn == 0.0) {
                maximized = saddle_objective(inst, x, Vector::zeros(spec.m));
            } else {
                Vector y_best = (std::sqrt(spec.ry_sq) / rn) * resid;
                maximized = saddle_objective(inst, x, y_best);
            }
            CHECK(primal_value(inst, x) == doctest::Approx(maximized).epsilon(1e-12));
        }
    }
    SUBCASE("infeasible x is rejected") {
        Vector far = Vector::constant(spec.n, 10.0);
        CHECK_THROWS_AS(primal_value(inst, far), DomainError);
    }
}

TEST_CASE("operator norms of the instance matrices") {
    for (int t : {1, 2, 4}) {
        for (int p : {2, 3}) {
            const HardInstance inst = build_hard_instance(t, p, 1.0, 1.0);
            // ||A|| = 2 L_A / p! (attained by the G block)
            CHECK(eigen_spectral_norm(inst.spec.a_mat) ==
                  doctest::Approx(2.0 / factorial(p)).epsilon(1e-9));
            CHECK(eigen_spectral_norm(inst.spec.b_band) <= 2.0);
        }
    }
    // L_A = 0 degenerates to the zero matrix
    const HardInstance zero = build_hard_instance(1, 2, 1.0, 0.0);
    CHECK(zero.spec.a_mat.max_abs() == 0.0);
}

TEST_CASE("lower bound value") {
    SUBCASE("frozen evaluation at p=2, t=1, L_f=1, L_A=0") {
        // (1/(10*3^4.5)) * (1/3) * 24^1.5 / 2^3.5, evaluated independently
        const double rx3 = std::pow(24.0, 1.5);
        const double expect = rx3 / (10.0 * std::pow(3.0, 4.5) * 3.0 * std::pow(2.0, 3.5));
        CHECK(lower_bound_value(1, 2, 1.0, 0.0) == doctest::Approx(expect).epsilon(1e-14));
        CHECK(lower_bound_value(1, 2, 1.0, 0.0) == doctest::Approx(2.4691e-3).epsilon(1e-3));
    }
    SUBCASE("L_A = 0 drops the coupling term") {
        const double with = lower_bound_value(3, 2, 1.0, 1.0);
        const double without = lower_bound_value(3, 2, 1.0, 0.0);
        CHECK(with > without);
        // the second term alone, reconstructed
        const double rx = std::sqrt(3.0) * std::pow(4.0, 1.5);
        const double ry = 2.0;
        const double term2 = (1.0 / 2.0) * rx * ry * ry / (std::sqrt(3.0) * std::pow(4.0, 1.5));
        CHECK(with - without == doctest::Approx(term2).epsilon(1e-12));
    }
    SUBCASE("duplicate-formula agreement on a grid") {
        for (int p : {2, 3}) {
            for (int t : {1, 2, 3, 5, 8}) {
                for (double la : {0.0, 0.5, 1.0}) {
                    const double got = lower_bound_value(t, p, 1.0, la);
                    // independent arrangement through logs
                    const double rx = std::sqrt(3.0) * std::pow(t + 1.0, 1.5);
                    const double t1 = std::exp(std::log(p / (10.0 * factorial(p + 1))) +
                                               (p + 1) * std::log(rx) -
                                               1.5 * (p + 1) * std::log(3.0) -
                                               0.5 * (3 * p + 1) * std::log(t + 1.0));
                    double t2 = 0.0;
                    if (la > 0.0)
                        t2 = std::exp(std::log(la / factorial(p)) + std::log(rx) +
                                      0.5 * p * std::log(t + 1.0) - 0.5 * std::log(3.0) -
                                      0.5 * (p + 1) * std::log(t + 1.0));
                    CHECK(got == doctest::Approx(t1 + t2).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("hard instance field is monotone and has the right structure") {
    const HardInstance inst = build_hard_instance(2, 2, 1.0, 1.0);
    const auto audit = monotonicity_audit(*inst.op, inst.set, 300, 31);
    CHECK(audit.min_pairing >= -1e-10);
    CHECK(audit.min_sym_eig >= -1e-9);

    // Jacobian: skew part only from the coupling blocks, symmetric part PSD
    CounterRng rng(33);
    const Vector z = inst.set.sample(rng);
    const DenseMatrix j = inst.op->jacobian(z);
    const int n = inst.spec.n;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            CHECK(j(a, b) == doctest::Approx(j(b, a)).epsilon(1e-12));  // f block symmetric
    for (int a = 0; a < inst.spec.m; ++a)
        for (int b = 0; b < inst.spec.m; ++b) CHECK(j(n + a, n + b) == 0.0);
}

TEST_CASE("finite differences corroborate the hand-written contractions") {
    SUBCASE("hard instance, orders the algorithms consume") {
        for (int p : {2, 3}) {
            const HardInstance inst = build_hard_instance(1, p, 1.0, 1.0);
            CounterRng rng(100 + p);
            for (int trial = 0; trial < 100; ++trial) {
                const Vector z = inst.set.sample(rng);
                Vector h(z.dim());
                for (int i = 0; i < h.dim(); ++i) h[i] = rng.uniform(-1.0, 1.0);
                for (int order = 1; order <= p - 1; ++order) {
                    const double scale = std::max(
                        1.0, inst.op->derivative_contraction(z, h, order).norm_inf());
                    CHECK(directional_derivative_check(*inst.op, order, z, h, 1e-4) / scale <=
                          1e-5);
                }
            }
        }
    }
    SUBCASE("p2 synthetic, both orders, away from the |x| kink") {
        auto op = build_p2_synthetic(6, 2.0, 1.0, 71, 0.2);
        CounterRng rng(73);
        for (int trial = 0; trial < 100; ++trial) {
            Vector x(6), h(6);
            for (int i = 0; i < 6; ++i) {
                const double mag = rng.uniform(0.05, 1.5);
                x[i] = (rng.next_double() < 0.5 ? -1.0 : 1.0) * mag;
                h[i] = rng.uniform(-1.0, 1.0);
            }
            for (int order = 1; order <= 2; ++order) {
                const double scale =
                    std::max(1.0, op->derivative_contraction(x, h, order).norm_inf());
                CHECK(directional_derivative_check(*op, order, x, h, 1e-4) / scale <= 1e-5);
            }
        }
    }
}

TEST_CASE("restricted minima reproduce the closed forms (p=2, L_f=1, L_A=1)") {
    for (int t : {1, 2, 3}) {
        const HardInstance inst = build_hard_instance(t, 2, 1.0, 1.0);
        const RestrictedMinima mins = restricted_minima(inst);
        const double f_expect = -(2.0 / 6.0) * std::pow(1.5, 1.5) * t;
        CHECK(mins.f_min == doctest::Approx(f_expect).epsilon(1e-4));
        const double r_expect = 0.5 * std::sqrt(t + 1.0);
        CHECK(mins.residual_min == doctest::Approx(r_expect).epsilon(1e-6));
    }
}

TEST_CASE("matrix game construction and gap") {
    SUBCASE("matching pennies equilibrium") {
        DenseMatrix a(2, 2);
        a(0, 0) = 1.0;
        a(0, 1) = -1.0;
        a(1, 0) = -1.0;
        a(1, 1) = 1.0;
        MatrixGame game = build_matrix_game(std::move(a));
        CHECK(game.l1 == 1.0);
        const Vector eq({0.5, 0.5, 0.5, 0.5});
        CHECK(matrix_game_gap(game.op->payoff(), eq) == doctest::Approx(0.0));
        // the field at the equilibrium is zero
        CHECK(game.op->value(eq).norm_inf() <= 1e-15);
    }
    SUBCASE("skew pairing vanishes: the game field is monotone with zero pairing") {
        CounterRng rng(37);
        DenseMatrix a(3, 4);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
        MatrixGame game = build_matrix_game(std::move(a));
        for (int trial = 0; trial < 100; ++trial) {
            const Vector z1 = game.set.sample(rng);
            const Vector z2 = game.set.sample(rng);
            const double pairing =
                (game.op->value(z1) - game.op->value(z2)).dot(z1 - z2);
            CHECK(std::fabs(pairing) <= 1e-12);
        }
    }
}

TEST_CASE("p2 synthetic operator") {
    auto op = build_p2_synthetic(8, 3.0, 1.0, 51, 0.0);
    CounterRng rng(53);
    SUBCASE("Jacobian Lipschitz constant is at most L_2 on samples") {
        for (int trial = 0; trial < 200; ++trial) {
            Vector x(8), y(8);
            for (int i = 0; i < 8; ++i) {
                x[i] = rng.uniform(-2.0, 2.0);
                y[i] = rng.uniform(-2.0, 2.0);
            }
            const DenseMatrix jx = op->jacobian(x);
            const DenseMatrix jy = op->jacobian(y);
            // the difference is diagonal, so the max-abs diagonal is its norm
            double diff = 0.0;
            for (int i = 0; i < 8; ++i) diff = std::max(diff, std::fabs(jx(i, i) - jy(i, i)));
            CHECK(diff <= 3.0 * (x - y).norm2() + 1e-12);
        }
    }
    SUBCASE("monotonicity: the skew part cancels in the pairing") {
        for (int trial = 0; trial < 200; ++trial) {
            Vector x(8), y(8);
            for (int i = 0; i < 8; ++i) {
                x[i] = rng.uniform(-2.0, 2.0);
                y[i] = rng.uniform(-2.0, 2.0);
            }
            CHECK((op->value(x) - op->value(y)).dot(x - y) >= -1e-12);
        }
    }
    SUBCASE("zero skew and zero offset has its root at the origin") {
        auto plain = build_p2_synthetic(4, 2.0, 0.0, 61, 0.3, 0.0);
        CHECK(plain->value(Vector::zeros(4)).norm2() == 0.0);
        const Vector root = monotone_root(*plain, Vector({0.2, -0.1, 0.3, 0.05}));
        CHECK(root.norm2() <= 1e-10);
    }
    SUBCASE("monotone_root solves g = 0 with a nonzero offset") {
        auto shifted = build_p2_synthetic(4, 2.0, 1.0, 61, 0.3);
        const Vector root = monotone_root(*shifted, Vector::zeros(4));
        CHECK(shifted->value(root).norm2() <= 1e-12);
    }
}
