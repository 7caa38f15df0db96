#pragma once
#include <cstdint>
#include <vector>
#include <functional>

namespace packspec {

// Dynamic bitset over vertex indices. Used as memo key for vertex subsets.
struct VertexMask {
    std::vector<uint64_t> w;

    VertexMask() = default;
    explicit VertexMask(int n) : w((n + 63) / 64, 0) {}

    void set(int i) { w[i >> 6] |= (1ULL << (i & 63)); }
    void reset(int i) { w[i >> 6] &= ~(1ULL << (i & 63)); }
    bool test(int i) const { return (w[i >> 6] >> (i & 63)) & 1ULL; }

    int count() const {
        int c = 0;
        for (uint64_t x : w) c += __builtin_popcountll(x);
        return c;
    }

    bool operator==(const VertexMask& o) const { return w == o.w; }

    template <class F>
    void for_each(F&& f) const {
        for (size_t k = 0; k < w.size(); ++k) {
            uint64_t x = w[k];
            while (x) {
                int b = __builtin_ctzll(x);
                f(static_cast<int>(k * 64 + b));
                x &= x - 1;
            }
        }
    }
};

struct VertexMaskHash {
    size_t operator()(const VertexMask& m) const {
        uint64_t h = 0xcbf29ce484222325ULL;
        for (uint64_t x : m.w) {
            h ^= x;
            h *= 0x100000001b3ULL;
        }
        return static_cast<size_t>(h);
    }
};

inline VertexMask make_mask(int n, const std::vector<int>& verts) {
    VertexMask m(n);
    for (int v : verts) m.set(v);
    return m;
}

} // namespace packspec
