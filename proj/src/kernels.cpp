#include "mviopt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mviopt::kern {

namespace ref {

double dot(const double* a, const double* b, std::size_t n) {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r += a[i] * b[i];
    return r;
}

double sum(const double* a, std::size_t n) {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r += a[i];
    return r;
}

double nrm2sq(const double* a, std::size_t n) { return dot(a, a, n); }

double nrm1(const double* a, std::size_t n) {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r += std::fabs(a[i]);
    return r;
}

double nrminf(const double* a, std::size_t n) {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::fabs(a[i]));
    return r;
}

void gemv(const double* a, const double* x, double* y, std::size_t m, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a + i * n;
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j) r += row[j] * x[j];
        y[i] = r;
    }
}

void gemv_t(const double* a, const double* x, double* y, std::size_t m, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a + i * n;
        const double xi = x[i];
        for (std::size_t j = 0; j < n; ++j) y[j] += row[j] * xi;
    }
}

void axpy(double* y, double alpha, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal(double* x, double alpha, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void signed_pow(const double* x, double* out, double e, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ax = std::fabs(x[i]);
        out[i] = (x[i] < 0.0 ? -1.0 : 1.0) * std::pow(ax, e);
    }
}

}  // namespace ref

namespace {

// Below these sizes the OpenMP fork/join overhead dominates; the dispatch
// depends only on problem size, never on thread count, so a given input
// always takes the same code path.
constexpr std::size_t kParVec = 1 << 14;
constexpr std::size_t kParMat = 1 << 15;
constexpr std::size_t kBlock = 2048;

// Deterministic parallel reduction: fixed-size block partials computed in
// parallel, then combined serially in block order.
template <class BlockFn>
double blocked_reduce(std::size_t n, double init, BlockFn block, bool take_max) {
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(nblocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long bi = 0; bi < static_cast<long long>(nblocks); ++bi) {
        const std::size_t lo = static_cast<std::size_t>(bi) * kBlock;
        const std::size_t hi = std::min(lo + kBlock, n);
        partial[static_cast<std::size_t>(bi)] = block(lo, hi);
    }
    double r = init;
    for (double p : partial) r = take_max ? std::max(r, p) : r + p;
    return r;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    if (n < kParVec) return ref::dot(a, b, n);
    return blocked_reduce(n, 0.0, [&](std::size_t lo, std::size_t hi) {
        return ref::dot(a + lo, b + lo, hi - lo);
    }, false);
}

double sum(const double* a, std::size_t n) {
    if (n < kParVec) return ref::sum(a, n);
    return blocked_reduce(n, 0.0, [&](std::size_t lo, std::size_t hi) {
        return ref::sum(a + lo, hi - lo);
    }, false);
}

double nrm2sq(const double* a, std::size_t n) { return dot(a, a, n); }

double nrm1(const double* a, std::size_t n) {
    if (n < kParVec) return ref::nrm1(a, n);
    return blocked_reduce(n, 0.0, [&](std::size_t lo, std::size_t hi) {
        return ref::nrm1(a + lo, hi - lo);
    }, false);
}

double nrminf(const double* a, std::size_t n) {
    if (n < kParVec) return ref::nrminf(a, n);
    return blocked_reduce(n, 0.0, [&](std::size_t lo, std::size_t hi) {
        return ref::nrminf(a + lo, hi - lo);
    }, true);
}

void gemv(const double* a, const double* x, double* y, std::size_t m, std::size_t n) {
    if (m * n < kParMat) {
        ref::gemv(a, x, y, m, n);
        return;
    }
    // One output row per task: each row sum is serial, so the result does not
    // depend on the thread count.
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(m); ++i) {
        const double* row = a + static_cast<std::size_t>(i) * n;
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j) r += row[j] * x[j];
        y[i] = r;
    }
}

void gemv_t(const double* a, const double* x, double* y, std::size_t m, std::size_t n) {
    if (m * n < kParMat) {
        ref::gemv_t(a, x, y, m, n);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long j = 0; j < static_cast<long long>(n); ++j) {
        double r = 0.0;
        for (std::size_t i = 0; i < m; ++i) r += a[i * n + static_cast<std::size_t>(j)] * x[i];
        y[j] = r;
    }
}

void axpy(double* y, double alpha, const double* x, std::size_t n) {
    if (n < kParVec) {
        ref::axpy(y, alpha, x, n);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i) y[i] += alpha * x[i];
}

void scal(double* x, double alpha, std::size_t n) {
    if (n < kParVec) {
        ref::scal(x, alpha, n);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i) x[i] *= alpha;
}

void signed_pow(const double* x, double* out, double e, std::size_t n) {
    if (n < kParVec) {
        ref::signed_pow(x, out, e, n);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const double ax = std::fabs(x[i]);
        out[i] = (x[i] < 0.0 ? -1.0 : 1.0) * std::pow(ax, e);
    }
}

}  // namespace mviopt::kern
