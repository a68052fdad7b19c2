#pragma once

#include <cstdint>

namespace ach {

// Counter-based splitmix64 stream. The constants are fixed so that any
// reimplementation reproduces the same values bit for bit:
//   z = (seed + counter * 0x9E3779B97F4A7C15)
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   out = z ^ (z >> 31)
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t counter = 0)
        : seed_(seed), counter_(counter) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo,hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // derived independent stream, e.g. one per worker or per pair
    Rng fork(std::uint64_t stream) const {
        Rng r(seed_ ^ (0x9E3779B97F4A7C15ULL * (stream + 1)), 0);
        return r;
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace ach
