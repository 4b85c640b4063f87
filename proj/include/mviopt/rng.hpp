#pragma once

#include <cstdint>
#include <vector>

namespace mviopt {

/// Counter-based pseudo-random generator (splitmix64 finalizer applied to a
/// seed/counter pair). Every draw is a pure function of (seed, counter), so
/// streams are reproducible bit-for-bit across platforms and may be split
/// freely without shared state.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    /// Independent substream: deterministic function of (seed, stream id).
    CounterRng substream(std::uint64_t stream_id) const {
        return CounterRng(mix(seed_ ^ mix(stream_id + 0x9e3779b97f4a7c15ull)));
    }

    std::uint64_t next_u64() { return mix(seed_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Standard normal via Box-Muller (two uniforms per draw, no cached state).
    double normal();

    std::vector<double> uniform_vector(int dim, double lo, double hi);
    std::vector<double> normal_vector(int dim);

    std::uint64_t seed() const { return seed_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace mviopt
