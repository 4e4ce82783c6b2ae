// random.hpp
// Seeded generator with a pinned uniform mapping. The draw sequence feeds
// persisted model files, and std::uniform_real_distribution is
// implementation-defined, so the 53-bit mapping is spelled out here.

#pragma once

#include <cstdint>
#include <random>

namespace qclsense {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return double(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace qclsense
