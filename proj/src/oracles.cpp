#include "mviopt/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace mviopt {

void SubproblemSpec::validate() const {
    if (!op || !prox || !set) throw ConfigError("SubproblemSpec: missing operator, prox or set");
    if (p < 1) throw ConfigError("SubproblemSpec: p must be >= 1");
    if (lp <= 0.0) throw ConfigError("SubproblemSpec: L_p must be > 0");
    if (center.dim() != op->dim()) throw ConfigError("SubproblemSpec: center dimension mismatch");
    if (!set->contains(center, 1e-9))
        throw DomainError("SubproblemSpec: expansion center outside the feasible set");
    if (p - 1 > op->max_derivative_order() && p > 1)
        throw UnsupportedOrderError("SubproblemSpec: operator lacks order p-1 derivatives");
}

Vector subproblem_field(const SubproblemSpec& spec, const Vector& y) {
    Vector field = taylor_expand(*spec.op, spec.p - 1, spec.center, y);
    const double w = spec.prox->omega(y, spec.center);
    double scale = 2.0 * spec.lp / factorial(spec.p);
    if (spec.p >= 2) scale *= std::pow(w, 0.5 * (spec.p - 1));
    if (scale != 0.0) {
        Vector reg = spec.prox->grad_d(y) - spec.prox->grad_d(spec.center);
        reg *= scale;
        field += reg;
    }
    return field;
}

FeasibleSet certification_region(const SubproblemSpec& spec) {
    if (spec.set->compact()) return *spec.set;
    if (spec.cert_region) {
        if (!spec.cert_region->compact())
            throw UnboundedCertificateError("certification_region: region must be compact");
        return *spec.cert_region;
    }
    // Default ball sized so that the solution (which stays within
    // (p! ||g(center)|| / (2 L_p))^(1/p) of the center) is well inside.
    const double gnorm = spec.op->value(spec.center).norm2();
    const double radius = 4.0 * spec.center.norm2() +
                          4.0 * std::pow(factorial(spec.p) * gnorm / (2.0 * spec.lp),
                                         1.0 / spec.p) +
                          1.0;
    return FeasibleSet::ball(Vector::zeros(spec.center.dim()), radius);
}

double subproblem_certificate(const SubproblemSpec& spec, const Vector& y) {
    const FeasibleSet region = certification_region(spec);
    return gap_certificate(region, y, subproblem_field(spec, y));
}

OracleResult solve_p1(const SubproblemSpec& spec) {
    spec.validate();
    if (spec.p != 1) throw ConfigError("solve_p1: spec must have p = 1");
    OracleResult r;
    r.solution = mirror_step(*spec.prox, *spec.set, spec.center,
                             spec.op->value(spec.center), 2.0 * spec.lp);
    r.delta_achieved = 0.0;
    r.inner_iterations = 1;
    return r;
}

namespace {

// Local Lipschitz estimate of the subproblem field from a few sampled pairs.
double sampled_lipschitz(const SubproblemSpec& spec, const FeasibleSet& region) {
    CounterRng rng(0x5eedU);
    double best = 0.0;
    for (int k = 0; k < 8; ++k) {
        const Vector a = region.sample(rng);
        const Vector b = region.sample(rng);
        const double dist = (a - b).norm2();
        if (dist < 1e-12) continue;
        const double df = (subproblem_field(spec, a) - subproblem_field(spec, b)).norm2();
        best = std::max(best, df / dist);
    }
    return std::max(best, 1e-8);
}

}  // namespace

OracleResult solve_inner(const SubproblemSpec& spec, double delta, int max_inner) {
    spec.validate();
    if (delta <= 0.0) throw ConfigError("solve_inner: delta must be > 0");

    if (spec.p == 1) {
        // Closed form available; one evaluation.
        OracleResult r = solve_p1(spec);
        r.delta_achieved = std::max(0.0, subproblem_certificate(spec, r.solution));
        return r;
    }

    const FeasibleSet region = certification_region(spec);
    const ProxSetup& prox = *spec.prox;

    Vector y = spec.center;
    double best_cert = subproblem_certificate(spec, y);
    Vector best = y;
    if (best_cert <= delta)
        return OracleResult{best, std::max(0.0, best_cert), 0};

    const double lip = sampled_lipschitz(spec, region);
    double step = 1.0 / (2.0 * lip);
    const double step_floor = step * 0x1.0p-30;

    // Running average of half iterates; checked alongside the current point.
    Vector avg_acc = Vector::zeros(y.dim());
    int avg_count = 0;

    constexpr int kCheckEvery = 16;
    double last_cert_now = best_cert;

    for (int k = 0; k < max_inner; ++k) {
        const double alpha = 1.0 / (2.0 * step);
        const Vector y_half = mirror_step(prox, region, y, subproblem_field(spec, y), alpha);
        y = mirror_step(prox, region, y, subproblem_field(spec, y_half), alpha);
        avg_acc += y_half;
        ++avg_count;

        if ((k + 1) % kCheckEvery == 0 || k + 1 == max_inner) {
            const double cert_y = subproblem_certificate(spec, y);
            if (cert_y < best_cert) {
                best_cert = cert_y;
                best = y;
            }
            Vector avg = (1.0 / avg_count) * avg_acc;
            if (region.contains(avg, 1e-9)) {
                const double cert_avg = subproblem_certificate(spec, avg);
                if (cert_avg < best_cert) {
                    best_cert = cert_avg;
                    best = avg;
                }
            }
            if (best_cert <= delta)
                return OracleResult{best, std::max(0.0, best_cert), k + 1};
            // A clear certificate increase at the current point signals the
            // step is too long for the local curvature.
            if (cert_y > 1.25 * last_cert_now + 1e-18)
                step = std::max(0.5 * step, step_floor);
            last_cert_now = cert_y;
        }
    }
    throw ConvergenceError("solve_inner: max_inner exhausted without certificate",
                           best.entries(), best_cert);
}

}  // namespace mviopt
