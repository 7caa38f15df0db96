#include "packspec/packing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace packspec {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Far graph over candidate vertices at a distance threshold, as bitsets.
struct FarGraph {
    int n;
    int words;
    std::vector<uint64_t> adj; // n rows of `words`

    FarGraph(int n_) : n(n_), words((n_ + 63) / 64), adj(static_cast<size_t>(n_) * words, 0) {}

    void add(int a, int b) {
        adj[static_cast<size_t>(a) * words + (b >> 6)] |= 1ULL << (b & 63);
        adj[static_cast<size_t>(b) * words + (a >> 6)] |= 1ULL << (a & 63);
    }
    const uint64_t* row(int v) const { return &adj[static_cast<size_t>(v) * words]; }
};

int popcount_words(const uint64_t* w, int words) {
    int c = 0;
    for (int i = 0; i < words; ++i) c += __builtin_popcountll(w[i]);
    return c;
}

// Upper bound on the largest clique inside `cand` via greedy sequential
// coloring in index order. Independent sets of the far graph are "mutually
// near" sets, so this stays tight on structured instances.
int coloring_bound(const FarGraph& g, const std::vector<uint64_t>& cand) {
    std::vector<std::vector<uint64_t>> classes; // vertices per color
    std::vector<uint64_t> tmp(g.words);
    int bound = 0;
    for (int wi = 0; wi < g.words; ++wi) {
        uint64_t x = cand[wi];
        while (x) {
            int b = __builtin_ctzll(x);
            x &= x - 1;
            int v = wi * 64 + b;
            bool placed = false;
            for (auto& cls : classes) {
                const uint64_t* r = g.row(v);
                bool conflict = false;
                for (int i = 0; i < g.words; ++i)
                    if (cls[i] & r[i]) {
                        conflict = true;
                        break;
                    }
                if (!conflict) {
                    cls[wi] |= 1ULL << b;
                    placed = true;
                    break;
                }
            }
            if (!placed) {
                classes.emplace_back(g.words, 0);
                classes.back()[wi] |= 1ULL << b;
                ++bound;
            }
        }
    }
    return bound;
}

// Lexicographic DFS for a clique of size `need` within `cand` (indices above
// `from`). Pruning only removes hopeless subtrees, so the first hit is the
// lexicographically smallest clique.
bool find_clique(const FarGraph& g, std::vector<uint64_t>& cand, int from, int need,
                 std::vector<int>& out, long long& budget) {
    if (need == 0) return true;
    if (--budget < 0) throw std::runtime_error("pack_radius: clique search budget exceeded");
    if (popcount_words(cand.data(), g.words) < need) return false;
    if (need > 1 && coloring_bound(g, cand) < need) return false;
    std::vector<uint64_t> sub(g.words);
    for (int wi = from >> 6; wi < g.words; ++wi) {
        uint64_t x = cand[wi];
        if (wi == (from >> 6)) x &= ~0ULL << (from & 63);
        while (x) {
            int b = __builtin_ctzll(x);
            x &= x - 1;
            int v = wi * 64 + b;
            const uint64_t* r = g.row(v);
            for (int i = 0; i < g.words; ++i) sub[i] = cand[i] & r[i];
            out.push_back(v);
            if (find_clique(g, sub, v + 1, need - 1, out, budget)) return true;
            out.pop_back();
            // v excluded from this subtree onward
            cand[wi] &= ~(1ULL << b);
            x &= cand[wi] >> 1 << 1; // keep iterating remaining bits
        }
    }
    return false;
}

bool feasible_at(const MetricMeasureSpace& space, double t, int K, std::vector<int>* witness,
                 long long budget = 40'000'000LL) {
    const int n = space.size();
    FarGraph g(n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (space.dist(a, b) >= t) g.add(a, b);
    std::vector<uint64_t> cand(g.words, 0);
    for (int v = 0; v < n; ++v) cand[v >> 6] |= 1ULL << (v & 63);
    std::vector<int> out;
    bool ok = find_clique(g, cand, 0, K, out, budget);
    if (ok && witness) *witness = out;
    return ok;
}

PackingResult greedy_pack(const MetricMeasureSpace& space, int K) {
    const int n = space.size();
    // start at the lexicographically smallest endpoint of a diameter pair
    int c0 = 0;
    double best = -1.0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (space.dist(a, b) > best) {
                best = space.dist(a, b);
                c0 = a;
            }
    std::vector<int> centers{c0};
    std::vector<double> mind(n);
    for (int v = 0; v < n; ++v) mind[v] = space.dist(c0, v);
    while (static_cast<int>(centers.size()) < K) {
        int pick = -1;
        double bd = -1.0;
        for (int v = 0; v < n; ++v)
            if (mind[v] > bd) {
                bd = mind[v];
                pick = v;
            }
        centers.push_back(pick);
        for (int v = 0; v < n; ++v) mind[v] = std::min(mind[v], space.dist(pick, v));
    }
    double minpair = kInf;
    for (size_t i = 0; i < centers.size(); ++i)
        for (size_t j = i + 1; j < centers.size(); ++j)
            minpair = std::min(minpair, space.dist(centers[i], centers[j]));
    std::sort(centers.begin(), centers.end());
    PackingResult r;
    r.centers = std::move(centers);
    r.radius = minpair / 2.0;
    r.k_plus_1 = K;
    r.exact = false;
    r.lower_bound = r.radius;
    // degree relaxation: a K-subset with pairwise >= t needs K vertices of far
    // degree >= K-1
    auto degree_ok = [&](double t) {
        int cnt = 0;
        for (int a = 0; a < n; ++a) {
            int deg = 0;
            for (int b = 0; b < n; ++b)
                if (b != a && space.dist(a, b) >= t) ++deg;
            if (deg >= K - 1) ++cnt;
        }
        return cnt >= K;
    };
    auto dv = space.distance_values();
    int lo = 0, hi = static_cast<int>(dv.size()) - 1, ans = 0;
    while (lo <= hi) {
        int mid = (lo + hi) / 2;
        if (degree_ok(dv[mid])) {
            ans = mid;
            lo = mid + 1;
        } else
            hi = mid - 1;
    }
    r.upper_bound = dv[ans] / 2.0;
    return r;
}

} // namespace

PackingResult pack_radius(const MetricMeasureSpace& space, int k_plus_1, PackMode mode) {
    const int n = space.size();
    if (k_plus_1 < 2) throw std::invalid_argument("pack_radius: k+1 must be >= 2");
    if (k_plus_1 > n) throw std::runtime_error("pack_radius: infeasible, k+1 exceeds vertex count");

    if (mode == PackMode::greedy) return greedy_pack(space, k_plus_1);
    if (mode == PackMode::auto_mode && (n > 512 || k_plus_1 > 128))
        return greedy_pack(space, k_plus_1);

    auto dv = space.distance_values();
    // feasibility is monotone nonincreasing in the threshold
    int lo = 0, hi = static_cast<int>(dv.size()) - 1, best = 0;
    while (lo <= hi) {
        int mid = (lo + hi) / 2;
        if (feasible_at(space, dv[mid], k_plus_1, nullptr)) {
            best = mid;
            lo = mid + 1;
        } else
            hi = mid - 1;
    }
    std::vector<int> witness;
    feasible_at(space, dv[best], k_plus_1, &witness);
    PackingResult r;
    r.centers = std::move(witness);
    std::sort(r.centers.begin(), r.centers.end());
    r.radius = dv[best] / 2.0;
    r.k_plus_1 = k_plus_1;
    r.exact = true;
    r.lower_bound = r.upper_bound = r.radius;
    return r;
}

double inradius(const MetricMeasureSpace& space, const std::vector<int>& A) {
    if (A.empty()) throw std::invalid_argument("inradius: empty subset");
    if (static_cast<int>(A.size()) >= space.size())
        throw std::invalid_argument("inradius: subset must be proper");
    std::vector<char> in(space.size(), 0);
    for (int v : A) {
        if (v < 0 || v >= space.size()) throw std::invalid_argument("inradius: bad vertex");
        in[v] = 1;
    }
    double best = 0.0;
    for (int v : A) {
        double d = kInf;
        for (int y = 0; y < space.size(); ++y)
            if (!in[y]) d = std::min(d, space.dist(v, y));
        best = std::max(best, d);
    }
    return best;
}

InpackResult inpack(const MetricMeasureSpace& space, const std::vector<int>& omega, int k) {
    const int n = space.size();
    if (omega.empty()) throw std::invalid_argument("inpack: empty Omega");
    if (static_cast<int>(omega.size()) >= n)
        throw std::invalid_argument("inpack: Omega must be proper");
    if (k < 1 || k > static_cast<int>(omega.size()))
        throw std::invalid_argument("inpack: need 1 <= k <= |Omega|");

    std::vector<char> in(n, 0);
    for (int v : omega) in[v] = 1;
    std::vector<double> bdist(n, 0.0);
    for (int v : omega) {
        double d = kInf;
        for (int y = 0; y < n; ++y)
            if (!in[y]) d = std::min(d, space.dist(v, y));
        bdist[v] = d;
    }

    // candidate objective values: boundary distances and half pairwise distances
    std::vector<double> vals;
    for (int v : omega) vals.push_back(bdist[v]);
    for (size_t i = 0; i < omega.size(); ++i)
        for (size_t j = i + 1; j < omega.size(); ++j)
            vals.push_back(space.dist(omega[i], omega[j]) / 2.0);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());

    auto feasible = [&](double t, std::vector<int>* witness) {
        std::vector<int> cand;
        for (int v : omega)
            if (bdist[v] >= t) cand.push_back(v);
        if (static_cast<int>(cand.size()) < k) return false;
        if (k == 1) {
            if (witness) *witness = {cand.front()};
            return true;
        }
        FarGraph g(static_cast<int>(cand.size()));
        for (int a = 0; a < static_cast<int>(cand.size()); ++a)
            for (int b = a + 1; b < static_cast<int>(cand.size()); ++b)
                if (space.dist(cand[a], cand[b]) >= 2.0 * t) g.add(a, b);
        std::vector<uint64_t> all(g.words, 0);
        for (int v = 0; v < g.n; ++v) all[v >> 6] |= 1ULL << (v & 63);
        std::vector<int> out;
        long long budget = 40'000'000LL;
        if (!find_clique(g, all, 0, k, out, budget)) return false;
        if (witness) {
            witness->clear();
            for (int i : out) witness->push_back(cand[i]);
        }
        return true;
    };

    int lo = 0, hi = static_cast<int>(vals.size()) - 1, best = -1;
    while (lo <= hi) {
        int mid = (lo + hi) / 2;
        if (feasible(vals[mid], nullptr)) {
            best = mid;
            lo = mid + 1;
        } else
            hi = mid - 1;
    }
    if (best < 0) throw std::runtime_error("inpack: infeasible");
    InpackResult r;
    feasible(vals[best], &r.centers);
    std::sort(r.centers.begin(), r.centers.end());
    r.radius = vals[best];
    return r;
}

CountingResult counting_function(const MetricMeasureSpace& space, double r, int k_max) {
    if (!(r > 0.0)) throw std::invalid_argument("counting_function: r must be positive");
    if (k_max < 1) throw std::invalid_argument("counting_function: k_max must be >= 1");
    CountingResult out;
    int hard_max = std::min(k_max, space.size() - 1);
    for (int k = 1; k <= hard_max; ++k) {
        double pk = pack_radius(space, k + 1, PackMode::exact).radius;
        out.pack_sequence.push_back(pk);
        if (pk > r)
            out.count = k;
        else
            return out; // monotone nonincreasing: no further k can exceed r
    }
    // ran out of k before crossing r
    if (!out.pack_sequence.empty() && out.pack_sequence.back() > r && hard_max == k_max)
        out.truncated = true;
    return out;
}

PackingLawReport packing_law_report(const std::vector<const MetricMeasureSpace*>& spaces,
                                    const std::vector<double>& vols, int dim,
                                    const std::vector<int>& k_list) {
    if (spaces.size() != vols.size())
        throw std::invalid_argument("packing_law_report: spaces/vols size mismatch");
    if (dim < 1) throw std::invalid_argument("packing_law_report: dim must be >= 1");
    PackingLawReport rep;
    rep.target = dim == 1 ? 0.5 : 0.0;
    double tail_sum = 0.0;
    int tail_count = 0;
    for (size_t si = 0; si < spaces.size(); ++si) {
        const auto& sp = *spaces[si];
        double min_pos = kInf;
        for (int x = 0; x < sp.size(); ++x)
            min_pos = std::min(min_pos, sp.min_positive_distance_from(x));
        for (int k : k_list) {
            if (k < 2 || k > sp.size()) continue;
            double pk = pack_radius(sp, k, PackMode::auto_mode).radius;
            PackingLawRow row;
            row.space_index = static_cast<int>(si);
            row.k = k;
            row.pack_k = pk;
            row.k_pack_n_over_vol = k * std::pow(pk, dim) / vols[si];
            // below one mesh cell the law degrades on a fixed graph
            row.in_valid_range = pk > min_pos;
            rep.rows.push_back(row);
            if (row.in_valid_range) {
                tail_sum += row.k_pack_n_over_vol;
                ++tail_count;
            }
        }
    }
    if (tail_count > 0) rep.extrapolated_constant = tail_sum / tail_count;
    return rep;
}

} // namespace packspec
