#pragma once

#include <cstdint>
#include <random>

namespace coopeq {

// Deterministic RNG. Sampling is done with explicit arithmetic on mt19937_64
// output words (the engine sequence is pinned by the standard), so draws are
// reproducible across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in the open interval (0, 1).
    double uniform01() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n), n >= 1.
    std::uint64_t uniform_int(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(gen_()) * static_cast<unsigned __int128>(n)) >> 64);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace coopeq
