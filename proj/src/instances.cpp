#include "mviopt/instances.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mviopt/kernels.hpp"

namespace mviopt {

namespace {

// B in R^{s x s}: +1 on the anti-diagonal, -1 on the band above it.
DenseMatrix band_matrix(int s) {
    DenseMatrix b(s, s);
    for (int r = 0; r < s; ++r) {
        b(r, s - 1 - r) = 1.0;
        if (r >= 1) b(r, s - r) = -1.0;
    }
    return b;
}

}  // namespace

HardInstanceOperator::HardInstanceOperator(HardInstanceSpec spec)
    : spec_(std::move(spec)), lin_coeff_((spec_.lf + 0.5 * spec_.la) / factorial(spec_.p)) {
    meta_.p = spec_.p;
    meta_.lp = std::pow(2.0, spec_.p + 1) * spec_.lf;  // L_f ||C||^{p+1} with ||C|| <= 2
    meta_.monotone = true;
    meta_.norm = NormKind::euclidean;
}

Vector HardInstanceOperator::apply_c(const Vector& x) const {
    Vector u = x;
    const Vector head = spec_.b_band.matvec(x.segment(0, spec_.s));
    u.set_segment(0, head);
    return u;
}

Vector HardInstanceOperator::apply_ct(const Vector& u) const {
    Vector x = u;
    const Vector head = spec_.b_band.tmatvec(u.segment(0, spec_.s));
    x.set_segment(0, head);
    return x;
}

double HardInstanceOperator::f_value(const Vector& x) const {
    const Vector u = apply_c(x);
    double acc = 0.0;
    for (int i = 0; i < u.dim(); ++i) acc += std::pow(std::fabs(u[i]), spec_.p + 1);
    return spec_.lf / factorial(spec_.p + 1) * acc - lin_coeff_ * x[0];
}

Vector HardInstanceOperator::f_gradient(const Vector& x) const {
    const Vector u = apply_c(x);
    Vector psi(u.dim());
    kern::signed_pow(u.data(), psi.data(), static_cast<double>(spec_.p),
                     static_cast<std::size_t>(u.dim()));
    Vector g = apply_ct(psi);
    g *= spec_.lf / factorial(spec_.p);
    g[0] -= lin_coeff_;
    return g;
}

DenseMatrix HardInstanceOperator::f_hessian(const Vector& x) const {
    const int n = spec_.n;
    const int s = spec_.s;
    const Vector u = apply_c(x);
    const double scale = spec_.lf / factorial(spec_.p) * spec_.p;
    DenseMatrix h(n, n);
    // C^T diag(p |u|^{p-1}) C with C = blockdiag(B, I): a dense s x s head
    // plus a diagonal tail.
    for (int i = 0; i < n; ++i) {
        const double w = scale * std::pow(std::fabs(u[i]), spec_.p - 1);
        if (i >= s) {
            h(i, i) = w;
            continue;
        }
        for (int a = 0; a < s; ++a) {
            const double bia = spec_.b_band(i, a);
            if (bia == 0.0) continue;
            for (int c = 0; c < s; ++c) {
                const double bic = spec_.b_band(i, c);
                if (bic != 0.0) h(a, c) += w * bia * bic;
            }
        }
    }
    return h;
}

Vector HardInstanceOperator::value_impl(const Vector& z) const {
    const Vector x = z.segment(0, spec_.n);
    const Vector y = z.segment(spec_.n, spec_.m);
    Vector gx = f_gradient(x) + spec_.a_mat.tmatvec(y);
    Vector gy = spec_.b_vec - spec_.a_mat.matvec(x);
    Vector g(dim());
    g.set_segment(0, gx);
    g.set_segment(spec_.n, gy);
    return g;
}

DenseMatrix HardInstanceOperator::jacobian_impl(const Vector& z) const {
    const int n = spec_.n;
    const int m = spec_.m;
    const Vector x = z.segment(0, n);
    const DenseMatrix hess = f_hessian(x);
    DenseMatrix j(n + m, n + m);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) j(i, k) = hess(i, k);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) {
            j(c, n + r) = spec_.a_mat(r, c);   // A^T block
            j(n + r, c) = -spec_.a_mat(r, c);  // -A block
        }
    }
    return j;
}

Vector HardInstanceOperator::contraction_impl(const Vector& z, const Vector& h,
                                              int order) const {
    if (order == 1) return jacobian_impl(z).matvec(h);
    // Orders >= 2 live entirely in the primal block; the bilinear coupling
    // and the dual block are affine.
    const int p = spec_.p;
    const Vector x = z.segment(0, spec_.n);
    const Vector hx = h.segment(0, spec_.n);
    const Vector u = apply_c(x);
    const Vector v = apply_c(hx);
    double coeff = spec_.lf / factorial(p);
    for (int k = 0; k < order; ++k) coeff *= (p - k);
    Vector w(u.dim());
    if (order == 2) {
        for (int i = 0; i < u.dim(); ++i) {
            const double sign = u[i] > 0.0 ? 1.0 : (u[i] < 0.0 ? -1.0 : 0.0);
            w[i] = coeff * std::pow(std::fabs(u[i]), p - 2) * sign * v[i] * v[i];
        }
    } else if (order == 3 && p == 3) {
        for (int i = 0; i < u.dim(); ++i) w[i] = coeff * v[i] * v[i] * v[i];
    } else {
        throw UnsupportedOrderError("HardInstanceOperator: unsupported contraction order");
    }
    Vector gx = apply_ct(w);
    Vector g(dim());
    g.set_segment(0, gx);
    return g;
}

Vector HardInstance::z_star() const {
    Vector z(spec.n + spec.m);
    z.set_segment(0, optimum.x_star);
    z.set_segment(spec.n, optimum.y_star);
    return z;
}

HardInstance build_hard_instance(int t, int p, double lf, double la, int n, int m) {
    if (t < 1) throw ConfigError("build_hard_instance: t must be >= 1");
    if (p < 2 || p > 3) throw ConfigError("build_hard_instance: p must be 2 or 3");
    if (lf <= 0.0 || la < 0.0 || lf < la)
        throw ConfigError("build_hard_instance: need L_f > 0, 0 <= L_A <= L_f");
    const int s = 2 * t + 1;
    if (m < 0) m = s + 1;
    if (n < 0) n = 2 * s + 1;
    if (m < s + 1) throw ConfigError("build_hard_instance: m must be >= 2t+2");
    if (n < m) throw ConfigError("build_hard_instance: m must not exceed n");

    HardInstanceSpec spec;
    spec.t = t;
    spec.p = p;
    spec.lf = lf;
    spec.la = la;
    spec.n = n;
    spec.m = m;
    spec.s = s;
    spec.b_band = band_matrix(s);
    spec.rx_sq = 3.0 * std::pow(t + 1.0, 3);
    spec.ry_sq = t + 1.0;

    const double a_scale = la / factorial(p);
    spec.a_mat = DenseMatrix(m, n);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) spec.a_mat(i, j) = a_scale * spec.b_band(i, j);
    for (int i = s; i < m; ++i) spec.a_mat(i, i) = a_scale * 2.0;  // G = 2 I
    spec.b_vec = Vector(m);
    for (int i = 0; i < s; ++i) spec.b_vec[i] = a_scale;

    ClosedFormOptimum opt;
    opt.x_star = Vector(n);
    for (int i = 0; i < s; ++i) opt.x_star[i] = static_cast<double>(s - i);
    opt.y_star = Vector(m);
    for (int i = 0; i < s; ++i) opt.y_star[i] = 0.5;
    opt.zeta_star = -((p / (p + 1.0)) * lf + 0.5 * la) / factorial(p) * s;

    HardInstance inst{std::move(spec), nullptr, std::move(opt),
                      ProxSetup::product({ProxSetup::euclidean(), ProxSetup::euclidean()},
                                         {n, m}),
                      FeasibleSet::product(
                          {FeasibleSet::ball(Vector::zeros(n), std::sqrt(3.0 * std::pow(t + 1.0, 3))),
                           FeasibleSet::ball(Vector::zeros(m), std::sqrt(t + 1.0))})};
    inst.op = std::make_shared<HardInstanceOperator>(inst.spec);
    return inst;
}

double saddle_objective(const HardInstance& inst, const Vector& x, const Vector& y) {
    if (x.dim() != inst.spec.n || y.dim() != inst.spec.m)
        throw DomainError("saddle_objective: dimension mismatch");
    const Vector resid = inst.spec.a_mat.matvec(x) - inst.spec.b_vec;
    return inst.op->f_value(x) + resid.dot(y);
}

double primal_value(const HardInstance& inst, const Vector& x) {
    if (x.dim() != inst.spec.n) throw DomainError("primal_value: dimension mismatch");
    if (x.norm2sq() > inst.spec.rx_sq * (1.0 + 1e-12))
        throw DomainError("primal_value: x outside the primal ball");
    const Vector resid = inst.spec.a_mat.matvec(x) - inst.spec.b_vec;
    return inst.op->f_value(x) + std::sqrt(inst.spec.ry_sq) * resid.norm2();
}

double lower_bound_value(int t, int p, double lf, double la) {
    const double rx = std::sqrt(3.0) * std::pow(t + 1.0, 1.5);
    const double ry = std::sqrt(t + 1.0);
    const double term1 = (1.0 / (10.0 * std::pow(3.0, 1.5 * (p + 1)))) *
                         (p * lf / factorial(p + 1)) * std::pow(rx, p + 1) /
                         std::pow(t + 1.0, 0.5 * (3 * p + 1));
    const double term2 = (la / factorial(p)) * rx * std::pow(ry, p) /
                         (std::sqrt(3.0) * std::pow(t + 1.0, 0.5 * (p + 1)));
    return term1 + term2;
}

namespace {

// Projected gradient on the span of the first t coordinates; the step is
// 1/(10 L) with L re-estimated from the iterate.
struct SubspacePgd {
    int free_coords;
    int max_iterations;

    template <class GradFn, class LipFn>
    std::pair<Vector, int> minimize(Vector x, GradFn grad, LipFn local_lip) const {
        int iters = 0;
        for (; iters < max_iterations; ++iters) {
            Vector g = grad(x);
            for (int i = free_coords; i < g.dim(); ++i) g[i] = 0.0;
            if (g.norm_inf() <= 1e-13) break;
            const double lip = std::max(local_lip(x), 1e-8);
            x -= (1.0 / (10.0 * lip)) * g;
        }
        return {std::move(x), iters};
    }
};

}  // namespace

RestrictedMinima restricted_minima(const HardInstance& inst, int max_iterations) {
    const auto& spec = inst.spec;
    const HardInstanceOperator& op = *inst.op;
    RestrictedMinima out;
    SubspacePgd pgd{spec.t, max_iterations};

    const double grad_scale = spec.lf / factorial(spec.p) * spec.p * 4.0;
    auto f_lip = [&](const Vector& x) {
        Vector u = x;
        const Vector head = spec.b_band.matvec(x.segment(0, spec.s));
        u.set_segment(0, head);
        double umax = 0.0;
        for (int i = 0; i < u.dim(); ++i) umax = std::max(umax, std::fabs(u[i]));
        return grad_scale * std::pow(umax, spec.p - 1) + 1e-3;
    };
    auto [xf, itf] = pgd.minimize(Vector::zeros(spec.n),
                                  [&](const Vector& x) { return op.f_gradient(x); }, f_lip);
    out.f_min = op.f_value(xf);
    out.iterations_f = itf;

    if (spec.la == 0.0) {
        out.residual_min = 0.0;
        out.iterations_residual = 0;
        return out;
    }
    const double a_norm_sq = std::pow(2.0 * spec.la / factorial(spec.p), 2);
    auto [xr, itr] = pgd.minimize(
        Vector::zeros(spec.n),
        [&](const Vector& x) {
            return spec.a_mat.tmatvec(spec.a_mat.matvec(x) - spec.b_vec);
        },
        [&](const Vector&) { return a_norm_sq; });
    out.residual_min = (spec.a_mat.matvec(xr) - spec.b_vec).norm2();
    out.iterations_residual = itr;
    return out;
}

MatrixGameOperator::MatrixGameOperator(DenseMatrix payoff) : payoff_(std::move(payoff)) {
    payoff_.assert_finite("MatrixGameOperator");
    meta_.p = 1;
    meta_.lp = payoff_.max_abs();
    meta_.monotone = true;
    meta_.norm = NormKind::l1;
}

Vector MatrixGameOperator::value_impl(const Vector& z) const {
    const int n = payoff_.cols();
    const int m = payoff_.rows();
    const Vector x = z.segment(0, n);
    const Vector y = z.segment(n, m);
    Vector g(n + m);
    g.set_segment(0, payoff_.tmatvec(y));
    Vector gy = payoff_.matvec(x);
    gy *= -1.0;
    g.set_segment(n, gy);
    return g;
}

DenseMatrix MatrixGameOperator::jacobian_impl(const Vector&) const {
    const int n = payoff_.cols();
    const int m = payoff_.rows();
    DenseMatrix j(n + m, n + m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) {
            j(c, n + r) = payoff_(r, c);
            j(n + r, c) = -payoff_(r, c);
        }
    }
    return j;
}

Vector MatrixGameOperator::contraction_impl(const Vector& z, const Vector& h,
                                            int order) const {
    if (order == 1) return jacobian_impl(z).matvec(h);
    return Vector::zeros(dim());
}

MatrixGame build_matrix_game(DenseMatrix payoff) {
    MatrixGame game;
    game.n = payoff.cols();
    game.m = payoff.rows();
    game.l1 = payoff.max_abs();
    game.op = std::make_shared<MatrixGameOperator>(std::move(payoff));
    game.prox = ProxSetup::product({ProxSetup::entropy(), ProxSetup::entropy()},
                                   {game.n, game.m});
    game.set = FeasibleSet::product(
        {FeasibleSet::simplex(game.n), FeasibleSet::simplex(game.m)});
    return game;
}

double matrix_game_gap(const DenseMatrix& payoff, const Vector& z) {
    const int n = payoff.cols();
    const int m = payoff.rows();
    if (z.dim() != n + m) throw DomainError("matrix_game_gap: dimension mismatch");
    const Vector ax = payoff.matvec(z.segment(0, n));
    const Vector aty = payoff.tmatvec(z.segment(n, m));
    double hi = ax[0];
    for (int i = 1; i < m; ++i) hi = std::max(hi, ax[i]);
    double lo = aty[0];
    for (int j = 1; j < n; ++j) lo = std::min(lo, aty[j]);
    return hi - lo;
}

Vector matrix_game_achieving_vertex(const DenseMatrix& payoff, const Vector& z) {
    const int n = payoff.cols();
    const int m = payoff.rows();
    const Vector ax = payoff.matvec(z.segment(0, n));
    const Vector aty = payoff.tmatvec(z.segment(n, m));
    int i_star = 0;
    for (int i = 1; i < m; ++i)
        if (ax[i] > ax[i_star]) i_star = i;
    int j_star = 0;
    for (int j = 1; j < n; ++j)
        if (aty[j] < aty[j_star]) j_star = j;
    Vector v(n + m);
    v[j_star] = 1.0;
    v[n + i_star] = 1.0;
    return v;
}

P2SyntheticOperator::P2SyntheticOperator(DenseMatrix skew, Vector offset, double l2,
                                         double mu)
    : skew_(std::move(skew)), offset_(std::move(offset)), l2_(l2), mu_(mu) {
    if (l2 <= 0.0) throw ConfigError("P2SyntheticOperator: L_2 must be > 0");
    if (mu < 0.0) throw ConfigError("P2SyntheticOperator: mu must be >= 0");
    meta_.p = 2;
    meta_.lp = l2;
    meta_.monotone = true;
    meta_.norm = NormKind::euclidean;
}

Vector P2SyntheticOperator::value_impl(const Vector& x) const {
    Vector g = skew_.matvec(x) + offset_;
    for (int i = 0; i < x.dim(); ++i)
        g[i] += 0.5 * l2_ * std::fabs(x[i]) * x[i] + mu_ * x[i];
    return g;
}

DenseMatrix P2SyntheticOperator::jacobian_impl(const Vector& x) const {
    DenseMatrix j = skew_;
    for (int i = 0; i < x.dim(); ++i) j(i, i) += l2_ * std::fabs(x[i]) + mu_;
    return j;
}

Vector P2SyntheticOperator::contraction_impl(const Vector& x, const Vector& h,
                                             int order) const {
    if (order == 1) return jacobian_impl(x).matvec(h);
    Vector w(x.dim());
    if (order == 2) {
        for (int i = 0; i < x.dim(); ++i) {
            const double sign = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
            w[i] = l2_ * sign * h[i] * h[i];
        }
    }
    return w;
}

std::shared_ptr<P2SyntheticOperator> build_p2_synthetic(int n, double l2,
                                                        double skew_scale,
                                                        std::uint64_t seed, double mu,
                                                        double offset_scale) {
    CounterRng rng(seed);
    DenseMatrix skew(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double v = skew_scale * rng.uniform(-1.0, 1.0) / std::sqrt(1.0 * n);
            skew(i, j) = v;
            skew(j, i) = -v;
        }
    }
    Vector offset(n);
    auto raw = rng.normal_vector(n);
    for (int i = 0; i < n; ++i) offset[i] = raw[static_cast<std::size_t>(i)];
    const double on = offset.norm2();
    // scaled to norm offset_scale so the root stays at O(offset_scale)
    if (on > 0.0) offset *= offset_scale / on;
    return std::make_shared<P2SyntheticOperator>(std::move(skew), std::move(offset), l2, mu);
}

Vector monotone_root(const Operator& op, const Vector& start, int max_iterations,
                     double tol) {
    Vector x = start;
    for (int it = 0; it < max_iterations; ++it) {
        const Vector g = op.value(x);
        const double gn = g.norm2();
        if (gn <= tol) return x;
        const LuFactorization lu(op.jacobian(x));
        const Vector dx = lu.solve(g);
        double tau = 1.0;
        while (tau > 1e-10) {
            Vector cand = x - tau * dx;
            if (op.value(cand).norm2() <= (1.0 - 0.25 * tau) * gn) {
                x = std::move(cand);
                break;
            }
            tau *= 0.5;
        }
        if (tau <= 1e-10)
            throw ConvergenceError("monotone_root: line search failed", x.entries(), gn);
    }
    const double gn = op.value(x).norm2();
    if (gn <= tol) return x;
    throw ConvergenceError("monotone_root: Newton did not reach tolerance", x.entries(), gn);
}

}  // namespace mviopt
