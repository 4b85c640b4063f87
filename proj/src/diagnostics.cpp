#include "mviopt/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace mviopt {

double estimate_lp(const Operator& op, int p, const FeasibleSet& region, int samples,
                   std::uint64_t seed) {
    if (p - 1 > op.max_derivative_order() && p > 1)
        throw UnsupportedOrderError("estimate_lp: operator lacks order p-1 derivatives");
    CounterRng rng(seed);
    double best = 0.0;
    const NormKind norm = op.meta().norm;
    for (int k = 0; k < samples; ++k) {
        const Vector x = region.sample(rng);
        const Vector y = region.sample(rng);
        const double dist = (y - x).norm(norm);
        if (dist < 1e-10) continue;
        Vector r = op.value(y) - taylor_expand(op, p - 1, x, y);
        best = std::max(best, r.norm(dual(norm)) / std::pow(dist, p));
    }
    return factorial(p) * best;
}

double fit_rate_exponent(const std::vector<std::pair<double, double>>& series,
                         int discard) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [k, gap] : series) {
        if (gap > 0.0) pts.emplace_back(std::log(k + 1.0), std::log(gap));
    }
    const int usable = static_cast<int>(pts.size());
    if (usable < 4) throw InsufficientDataError("fit_rate_exponent: fewer than 4 usable points");
    const int skip = std::clamp(discard, 0, usable - 4);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const int n = usable - skip;
    for (int i = skip; i < usable; ++i) {
        sx += pts[i].first;
        sy += pts[i].second;
        sxx += pts[i].first * pts[i].first;
        sxy += pts[i].first * pts[i].second;
    }
    const double denom = n * sxx - sx * sx;
    if (std::fabs(denom) < 1e-30)
        throw InsufficientDataError("fit_rate_exponent: degenerate abscissas");
    return (n * sxy - sx * sy) / denom;
}

bool power_mean_check(const std::vector<double>& xi, double q, double r) {
    double sum_sq = 0.0;
    for (double x : xi) {
        if (x < 0.0) throw DomainError("power_mean_check: entries must be nonnegative");
        if (x == 0.0 && q > 0.0) throw DomainError("power_mean_check: zero entry with q > 0");
        sum_sq += x * x;
    }
    if (sum_sq > r * (1.0 + 1e-12))
        throw DomainError("power_mean_check: premise sum xi^2 <= R violated");
    double sum_negq = 0.0;
    for (double x : xi) sum_negq += std::pow(x, -q);
    const double t = static_cast<double>(xi.size());
    const double bound = std::pow(t, 0.5 * q + 1.0) / std::pow(r, 0.5 * q);
    return sum_negq >= bound * (1.0 - 1e-12);
}

MonotonicityAudit monotonicity_audit(const Operator& op, const FeasibleSet& region,
                                     int pairs, std::uint64_t seed) {
    CounterRng rng(seed);
    MonotonicityAudit out;
    out.min_pairing = std::numeric_limits<double>::infinity();
    out.min_sym_eig = std::numeric_limits<double>::infinity();
    for (int k = 0; k < pairs; ++k) {
        const Vector x = region.sample(rng);
        const Vector y = region.sample(rng);
        const double d2 = (x - y).norm2sq();
        if (d2 < 1e-20) continue;
        const double pairing = (op.value(x) - op.value(y)).dot(x - y) / d2;
        out.min_pairing = std::min(out.min_pairing, pairing);
    }
    const int points = std::max(1, pairs / 10);
    for (int k = 0; k < points; ++k) {
        const Vector x = region.sample(rng);
        const DenseMatrix j = op.jacobian(x);
        DenseMatrix sym(j.rows(), j.cols());
        for (int a = 0; a < j.rows(); ++a)
            for (int b = 0; b < j.cols(); ++b) sym(a, b) = 0.5 * (j(a, b) + j(b, a));
        out.min_sym_eig = std::min(out.min_sym_eig, min_symmetric_eigenvalue(sym));
    }
    return out;
}

}  // namespace mviopt
