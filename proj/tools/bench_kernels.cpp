// Timing comparison of the OpenMP kernels against the serial reference,
// plus a correctness diff at each size.

#include <chrono>
#include <cstdio>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mviopt/kernels.hpp"
#include "mviopt/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <class Fn>
double time_ms(Fn fn, int reps) {
    fn();  // warm up
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("openmp: %d thread(s)\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled\n");
#endif

    mviopt::CounterRng rng(42);

    std::printf("\n%-10s %-12s %12s %12s %9s %12s\n", "kernel", "size", "serial(ms)",
                "parallel(ms)", "speedup", "max|diff|");
    for (std::size_t n : {std::size_t(1) << 12, std::size_t(1) << 16, std::size_t(1) << 20}) {
        std::vector<double> a(n), b(n);
        for (auto& x : a) x = rng.uniform(-1.0, 1.0);
        for (auto& x : b) x = rng.uniform(-1.0, 1.0);
        double r_ref = 0.0, r_par = 0.0;
        const double t_ref = time_ms([&] { r_ref = mviopt::kern::ref::dot(a.data(), b.data(), n); }, 50);
        const double t_par = time_ms([&] { r_par = mviopt::kern::dot(a.data(), b.data(), n); }, 50);
        std::printf("%-10s %-12zu %12.4f %12.4f %8.2fx %12.3e\n", "dot", n, t_ref, t_par,
                    t_ref / t_par, std::fabs(r_ref - r_par));
    }

    for (std::size_t n : {std::size_t(128), std::size_t(512), std::size_t(1024)}) {
        std::vector<double> a(n * n), x(n), y_ref(n), y_par(n);
        for (auto& v : a) v = rng.uniform(-1.0, 1.0);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        const double t_ref =
            time_ms([&] { mviopt::kern::ref::gemv(a.data(), x.data(), y_ref.data(), n, n); }, 20);
        const double t_par =
            time_ms([&] { mviopt::kern::gemv(a.data(), x.data(), y_par.data(), n, n); }, 20);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::fabs(y_ref[i] - y_par[i]));
        char size[48];
        std::snprintf(size, sizeof(size), "%zux%zu", n, n);
        std::printf("%-10s %-12s %12.4f %12.4f %8.2fx %12.3e\n", "gemv", size, t_ref, t_par,
                    t_ref / t_par, diff);
    }
    return 0;
}
