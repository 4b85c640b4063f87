#include "mviopt/rng.hpp"

#include <cmath>

namespace mviopt {

double CounterRng::normal() {
    // Box-Muller; u1 kept away from 0 so the log is finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

std::vector<double> CounterRng::uniform_vector(int dim, double lo, double hi) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (auto& x : v) x = uniform(lo, hi);
    return v;
}

std::vector<double> CounterRng::normal_vector(int dim) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (auto& x : v) x = normal();
    return v;
}

}  // namespace mviopt
