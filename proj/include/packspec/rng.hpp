#pragma once
#include <cstdint>

namespace packspec {

// splitmix64: deterministic across platforms, unlike std distributions.
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return (next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    uint64_t below(uint64_t n) { return n ? next() % n : 0; }
};

inline uint64_t mix_seeds(uint64_t a, uint64_t b) {
    SplitMix64 r(a ^ (b * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL));
    return r.next();
}

} // namespace packspec
