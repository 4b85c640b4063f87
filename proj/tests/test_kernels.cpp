#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mviopt/kernels.hpp"
#include "mviopt/rng.hpp"

using namespace mviopt;

namespace {

std::vector<double> random_vec(CounterRng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference") {
    CounterRng rng(7);
    for (std::size_t n : {std::size_t(17), std::size_t(4096), std::size_t(1) << 15}) {
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);
        CHECK(kern::dot(a.data(), b.data(), n) ==
              doctest::Approx(kern::ref::dot(a.data(), b.data(), n)).epsilon(1e-13));
        CHECK(kern::nrm1(a.data(), n) ==
              doctest::Approx(kern::ref::nrm1(a.data(), n)).epsilon(1e-13));
        CHECK(kern::nrminf(a.data(), n) == kern::ref::nrminf(a.data(), n));
        CHECK(kern::sum(a.data(), n) ==
              doctest::Approx(kern::ref::sum(a.data(), n)).epsilon(1e-12));
    }
}

TEST_CASE("gemv and gemv_t match the reference") {
    CounterRng rng(11);
    for (std::size_t m : {std::size_t(3), std::size_t(64), std::size_t(300)}) {
        const std::size_t n = m + 5;
        auto a = random_vec(rng, m * n);
        auto x = random_vec(rng, n);
        auto xt = random_vec(rng, m);
        std::vector<double> y1(m), y2(m), z1(n), z2(n);
        kern::ref::gemv(a.data(), x.data(), y1.data(), m, n);
        kern::gemv(a.data(), x.data(), y2.data(), m, n);
        kern::ref::gemv_t(a.data(), xt.data(), z1.data(), m, n);
        kern::gemv_t(a.data(), xt.data(), z2.data(), m, n);
        for (std::size_t i = 0; i < m; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-13));
        for (std::size_t j = 0; j < n; ++j) CHECK(z1[j] == doctest::Approx(z2[j]).epsilon(1e-13));
    }
}

TEST_CASE("signed_pow applies |x|^(e-1) x") {
    const double xs[4] = {-2.0, -0.5, 0.0, 3.0};
    double out[4];
    kern::signed_pow(xs, out, 2.0, 4);
    CHECK(out[0] == doctest::Approx(-4.0));
    CHECK(out[1] == doctest::Approx(-0.25));
    CHECK(out[2] == 0.0);
    CHECK(out[3] == doctest::Approx(9.0));
}

#ifdef _OPENMP
TEST_CASE("reductions are bit-identical across thread counts") {
    CounterRng rng(13);
    const std::size_t n = std::size_t(1) << 16;  // above the parallel threshold
    auto a = random_vec(rng, n);
    auto b = random_vec(rng, n);

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const double d1 = kern::dot(a.data(), b.data(), n);
    const double s1 = kern::sum(a.data(), n);
    omp_set_num_threads(4);
    const double d4 = kern::dot(a.data(), b.data(), n);
    const double s4 = kern::sum(a.data(), n);
    omp_set_num_threads(saved);

    CHECK(d1 == d4);  // exact equality by fixed-block combination
    CHECK(s1 == s4);
}
#endif
