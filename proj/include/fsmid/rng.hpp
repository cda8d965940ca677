#pragma once

#include <cstdint>

namespace fsmid {

// SplitMix64. Chosen over std::mt19937_64 + distributions so that every
// seeded artifact is byte-identical across standard libraries. The stream
// for seed s is z_{i+1} = mix(s + (i+1) * 0x9e3779b97f4a7c15).
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound) by modulo reduction; bound is tiny relative to
    // 2^64 everywhere this is used, so the bias is negligible and the
    // result stays reproducible.
    uint64_t below(uint64_t bound) { return next() % bound; }

    // Uniform double in [0, 1) with 53 significant bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

} // namespace fsmid
