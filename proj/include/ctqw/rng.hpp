#pragma once

#include <cstdint>

namespace ctqw {

// SplitMix64: tiny counter-based generator. Used for all stochastic sampling
// so that any (seed, realization, link) triple maps to the same trajectory
// regardless of thread count or evaluation order.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform double in the open interval (0,1).
    double next_u01() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53;
    }
};

// One scrambling round; combines two words into a well-mixed digest.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    SplitMix64 g(a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)));
    return g.next();
}

}  // namespace ctqw
