#include "packspec/fakespec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "packspec/mask.hpp"
#include "packspec/packing.hpp"
#include "packspec/rng.hpp"

namespace packspec {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "exhaustive") return Strategy::exhaustive;
    if (s == "local") return Strategy::local;
    if (s == "anneal") return Strategy::anneal;
    throw std::invalid_argument("unknown strategy: " + s);
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::exhaustive: return "exhaustive";
        case Strategy::local: return "local";
        case Strategy::anneal: return "anneal";
    }
    return "?";
}

void validate_family(const MetricMeasureSpace& space, const DisjointFamily& family) {
    if (family.supports.empty()) throw std::invalid_argument("family: no supports");
    std::vector<int> owner(space.size(), -1);
    std::vector<char> inOmega(space.size(), 1);
    if (family.ambient) {
        std::fill(inOmega.begin(), inOmega.end(), 0);
        for (int v : *family.ambient) inOmega[v] = 1;
        if (static_cast<int>(family.ambient->size()) >= space.size())
            throw std::invalid_argument("family: ambient Omega must be proper");
    }
    for (size_t i = 0; i < family.supports.size(); ++i) {
        if (family.supports[i].empty()) throw std::invalid_argument("family: empty support");
        for (int v : family.supports[i]) {
            if (v < 0 || v >= space.size())
                throw std::invalid_argument("family: bad vertex index");
            if (!inOmega[v])
                throw std::invalid_argument("family: support leaves the ambient set");
            if (owner[v] >= 0) throw std::invalid_argument("family: supports overlap");
            owner[v] = static_cast<int>(i);
        }
    }
    for (auto& e : space.edges()) {
        int a = owner[e.u], b = owner[e.v];
        if (a >= 0 && b >= 0 && a != b)
            throw std::invalid_argument("family: supports are adjacent");
    }
}

namespace {

double log_mean_exp(const std::vector<double>& logs) {
    double mx = -kInf;
    for (double v : logs) mx = std::max(mx, v);
    if (mx == -kInf) return -kInf;
    double s = 0.0;
    for (double v : logs) s += std::exp(v - mx);
    return mx + std::log(s / logs.size());
}

enum class Objective { max_of, mean_of };

// Shared per-(space, p) evaluation engine with a per-support memo.
struct FamilyEval {
    using Memo = std::unordered_map<VertexMask, FakespecMemoEntry, VertexMaskHash>;
    const MetricMeasureSpace& space;
    double p;
    FakespecConfig cfg;
    Memo local_search, local_final;

    FamilyEval(const MetricMeasureSpace& s, double p_, const FakespecConfig& c)
        : space(s), p(p_), cfg(c) {}

    Memo& memo(bool final_quality) {
        if (cfg.memo && cfg.memo->p == p)
            return final_quality ? cfg.memo->final_q : cfg.memo->search;
        return final_quality ? local_final : local_search;
    }

    // warm: a minimizer of a nearby support, used to seed the search-quality
    // descent; final-quality solves always run from scratch
    double support_log_lambda(const std::vector<int>& support, bool final_quality,
                              const FunctionOnSpace* warm = nullptr) {
        auto& mm = memo(final_quality);
        VertexMask key = make_mask(space.size(), support);
        auto it = mm.find(key);
        if (it != mm.end()) return it->second.log_lambda;
        EnergyConfig e = cfg.energy;
        e.p = p;
        e.seed = cfg.seed;
        if (final_quality) {
            e.restarts = cfg.final_restarts;
        } else {
            e.restarts = cfg.search_restarts;
            e.max_iter = std::min(e.max_iter, 4000);
            e.tol = std::max(e.tol, 1e-7);
            if (warm) e.init = *warm;
        }
        EigenResult r = dirichlet_eig1(space, support, e);
        double lg = r.log_lambda;
        mm.emplace(std::move(key), FakespecMemoEntry{lg, std::move(r.minimizer)});
        return lg;
    }

    const FunctionOnSpace* minimizer_of(const std::vector<int>& support, bool final_quality) {
        auto& mm = memo(final_quality);
        auto it = mm.find(make_mask(space.size(), support));
        return it == mm.end() ? nullptr : &it->second.minimizer;
    }
};

void canonicalize(DisjointFamily& fam) {
    for (auto& s : fam.supports) std::sort(s.begin(), s.end());
    std::sort(fam.supports.begin(), fam.supports.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                  return a.front() < b.front();
              });
}

FakeSpecResult finish_result(FamilyEval& ev, DisjointFamily fam, Strategy strat,
                             Certificate cert, int k_for_bound) {
    canonicalize(fam);
    validate_family(ev.space, fam);
    FakeSpecResult out;
    out.strategy = strat;
    out.certificate = cert;
    std::vector<double> logs;
    for (auto& s : fam.supports) logs.push_back(ev.support_log_lambda(s, true));
    out.per_set_log_lambda = logs;
    for (double lg : logs) out.per_set_lambda.push_back(std::exp(lg));
    out.log_lambda_bar = *std::max_element(logs.begin(), logs.end());
    out.log_lambda_under = log_mean_exp(logs);
    out.lambda_bar = std::exp(out.log_lambda_bar);
    out.lambda_under = std::exp(out.log_lambda_under);
    out.lambda_bar_root = std::exp(out.log_lambda_bar / ev.p);
    out.lambda_under_root = std::exp(out.log_lambda_under / ev.p);
    out.family = std::move(fam);
    if (k_for_bound >= 1 && !out.family.ambient) {
        try {
            PackingBound pb = packing_upper_bound(ev.space, k_for_bound, ev.p);
            out.packing_bound = pb.value;
            out.packing_bound_root = pb.root;
        } catch (const std::exception&) {
            out.packing_bound = kInf;
            out.packing_bound_root = kInf;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// exhaustive: enumerate used-vertex subsets; per subset the objective depends
// only on the multiset of component Dirichlet values.

struct ExhaustiveBest {
    double log_obj = kInf;
    std::vector<uint32_t> comp_masks;
};

struct ExhaustiveOut {
    ExhaustiveBest best_max, best_mean;
    bool feasible = false;
};

ExhaustiveOut exhaustive_scan(FamilyEval& ev, const std::optional<std::vector<int>>& ambient,
                              int K) {
    const int n = ev.space.size();
    if (n > 32)
        throw std::runtime_error("exhaustive: refused, vertex count exceeds 32");
    uint32_t full = 0;
    if (ambient) {
        for (int v : *ambient) full |= 1u << v;
    } else {
        full = n == 32 ? 0xffffffffu : ((1u << n) - 1);
    }
    std::vector<uint32_t> adj(n, 0);
    for (auto& e : ev.space.edges()) {
        adj[e.u] |= 1u << e.v;
        adj[e.v] |= 1u << e.u;
    }
    std::unordered_map<uint32_t, double> comp_lambda;
    auto comp_value = [&](uint32_t cmask) {
        auto it = comp_lambda.find(cmask);
        if (it != comp_lambda.end()) return it->second;
        std::vector<int> verts;
        for (uint32_t x = cmask; x; x &= x - 1) verts.push_back(__builtin_ctz(x));
        double lg = ev.support_log_lambda(verts, true);
        comp_lambda.emplace(cmask, lg);
        return lg;
    };

    ExhaustiveOut out;
    std::vector<std::pair<double, uint32_t>> comps;
    for (uint32_t s = full;; s = (s - 1) & full) {
        if (static_cast<int>(__builtin_popcount(s)) >= K) {
            comps.clear();
            uint32_t rem = s;
            while (rem) {
                uint32_t comp = rem & (~rem + 1); // lowest bit
                uint32_t frontier = comp;
                while (frontier) {
                    uint32_t nxt = 0;
                    for (uint32_t x = frontier; x; x &= x - 1)
                        nxt |= adj[__builtin_ctz(x)];
                    nxt &= s & ~comp;
                    comp |= nxt;
                    frontier = nxt;
                }
                comps.push_back({0.0, comp});
                rem &= ~comp;
            }
            if (static_cast<int>(comps.size()) >= K) {
                out.feasible = true;
                for (auto& c : comps) c.first = comp_value(c.second);
                std::partial_sort(comps.begin(), comps.begin() + K, comps.end());
                double vmax = comps[K - 1].first;
                if (vmax < out.best_max.log_obj) {
                    out.best_max.log_obj = vmax;
                    out.best_max.comp_masks.clear();
                    for (int i = 0; i < K; ++i)
                        out.best_max.comp_masks.push_back(comps[i].second);
                }
                std::vector<double> firstK;
                for (int i = 0; i < K; ++i) firstK.push_back(comps[i].first);
                double vmean = log_mean_exp(firstK);
                if (vmean < out.best_mean.log_obj) {
                    out.best_mean.log_obj = vmean;
                    out.best_mean.comp_masks.clear();
                    for (int i = 0; i < K; ++i)
                        out.best_mean.comp_masks.push_back(comps[i].second);
                }
            }
        }
        if (s == 0) break;
    }
    return out;
}

DisjointFamily family_from_masks(const std::vector<uint32_t>& masks,
                                 const std::optional<std::vector<int>>& ambient) {
    DisjointFamily fam;
    fam.ambient = ambient;
    for (uint32_t m : masks) {
        std::vector<int> verts;
        for (uint32_t x = m; x; x &= x - 1) verts.push_back(__builtin_ctz(x));
        fam.supports.push_back(std::move(verts));
    }
    return fam;
}

// ---------------------------------------------------------------------------
// local search

struct SearchState {
    std::vector<std::vector<int>> supports;
    std::vector<double> logv;
    std::vector<int> owner; // vertex -> support index or -1

    void rebuild_owner(int n) {
        owner.assign(n, -1);
        for (size_t i = 0; i < supports.size(); ++i)
            for (int v : supports[i]) owner[v] = static_cast<int>(i);
    }
};

struct Move {
    enum Kind { add, remove, transfer, shell, shift } kind;
    int v;
    int i; // target support (add/shell), source support (remove/transfer/shift)
    int j; // destination (transfer/shift)
    int u; // shift: the blocking vertex surrendered by support i
};

class LocalSearch {
public:
    LocalSearch(FamilyEval& ev, const std::optional<std::vector<int>>& ambient, Objective obj)
        : ev_(ev), obj_(obj), in_omega_(ev.space.size(), 1) {
        if (ambient) {
            std::fill(in_omega_.begin(), in_omega_.end(), 0);
            for (int v : *ambient) in_omega_[v] = 1;
        }
    }

    // objective + mean tiebreak
    std::pair<double, double> score(const SearchState& st) const {
        double mx = *std::max_element(st.logv.begin(), st.logv.end());
        double mean = log_mean_exp(st.logv);
        return obj_ == Objective::max_of ? std::make_pair(mx, mean)
                                         : std::make_pair(mean, mx);
    }

    bool vertex_free_for(const SearchState& st, int v, int target) const {
        if (!in_omega_[v]) return false;
        if (st.owner[v] >= 0) return false;
        for (auto [ei, u] : ev_.space.incident(v)) {
            int o = st.owner[u];
            if (o >= 0 && o != target) return false;
        }
        return true;
    }

    SearchState run(SearchState st, uint64_t seed) {
        const int n = ev_.space.size();
        st.rebuild_owner(n);
        for (size_t i = 0; i < st.supports.size(); ++i)
            st.logv[i] = ev_.support_log_lambda(st.supports[i], false);
        auto cur = score(st);
        SplitMix64 rng(mix_seeds(ev_.cfg.seed, seed));
        for (int pass = 0; pass < ev_.cfg.max_passes; ++pass) {
            std::vector<Move> moves = enumerate_moves(st);
            // first-improvement in seeded random order
            for (size_t i = moves.size(); i > 1; --i)
                std::swap(moves[i - 1], moves[rng.below(i)]);
            bool improved = false;
            for (auto& mv : moves) {
                SearchState next = apply(st, mv);
                if (next.supports.empty()) continue;
                auto val = score(next);
                if (val.first < cur.first - 1e-12 ||
                    (val.first < cur.first + 1e-12 && val.second < cur.second - 1e-12)) {
                    st = std::move(next);
                    cur = val;
                    improved = true;
                    break;
                }
            }
            if (!improved) break;
        }
        return st;
    }

    SearchState anneal(SearchState st, uint64_t seed) {
        const int n = ev_.space.size();
        st.rebuild_owner(n);
        for (size_t i = 0; i < st.supports.size(); ++i)
            st.logv[i] = ev_.support_log_lambda(st.supports[i], false);
        SplitMix64 rng(mix_seeds(ev_.cfg.seed, seed ^ 0xa11ea1u));
        SearchState best = st;
        auto cur = score(st), bestv = cur;
        const int iters = std::max(50, n * ev_.cfg.anneal_iters_per_vertex);
        for (int it = 0; it < iters; ++it) {
            double frac = static_cast<double>(it) / iters;
            double T = ev_.cfg.anneal_t0 *
                       std::pow(ev_.cfg.anneal_t1 / ev_.cfg.anneal_t0, frac);
            std::vector<Move> moves = enumerate_moves(st);
            if (moves.empty()) break;
            Move mv = moves[rng.below(moves.size())];
            SearchState next = apply(st, mv);
            if (next.supports.empty()) continue;
            auto val = score(next);
            double delta = val.first - cur.first;
            if (delta < 0 || rng.uniform() < std::exp(-delta / T)) {
                st = std::move(next);
                cur = val;
                if (cur.first < bestv.first) {
                    best = st;
                    bestv = cur;
                }
            }
        }
        return run(best, seed ^ 0x51u); // final hill-climb polish
    }

private:
    std::vector<Move> enumerate_moves(const SearchState& st) const {
        std::vector<Move> out;
        const int n = ev_.space.size();
        const int K = static_cast<int>(st.supports.size());
        for (int v = 0; v < n; ++v) {
            if (st.owner[v] < 0) {
                if (!in_omega_[v]) continue;
                for (int i = 0; i < K; ++i)
                    if (vertex_free_for(st, v, i)) out.push_back({Move::add, v, i, -1, -1});
                // shift: v would join support j but one vertex u of another
                // support blocks it; surrender u and hand v to j in one move
                std::vector<std::pair<int, int>> owned; // (vertex, owner)
                for (auto [ei, u] : ev_.space.incident(v))
                    if (st.owner[u] >= 0) owned.push_back({u, st.owner[u]});
                if (owned.size() >= 2) {
                    std::vector<int> owners;
                    for (auto& [u, o] : owned) owners.push_back(o);
                    std::sort(owners.begin(), owners.end());
                    owners.erase(std::unique(owners.begin(), owners.end()), owners.end());
                    for (int j : owners) {
                        int cnt = 0, bu = -1, bo = -1;
                        for (auto& [u, o] : owned)
                            if (o != j) {
                                ++cnt;
                                bu = u;
                                bo = o;
                            }
                        if (cnt == 1 && st.supports[bo].size() > 1)
                            out.push_back({Move::shift, v, bo, j, bu});
                    }
                }
            } else {
                int i = st.owner[v];
                if (st.supports[i].size() > 1) {
                    out.push_back({Move::remove, v, i, -1, -1});
                    for (int j = 0; j < K; ++j)
                        if (j != i && transfer_ok(st, v, i, j))
                            out.push_back({Move::transfer, v, i, j, -1});
                }
            }
        }
        for (int i = 0; i < K; ++i) out.push_back({Move::shell, -1, i, -1, -1});
        return out;
    }

    bool transfer_ok(const SearchState& st, int v, int i, int j) const {
        (void)i;
        // after moving v to j, every neighbor of v must be unused or in j
        for (auto [ei, u] : ev_.space.incident(v)) {
            int o = st.owner[u];
            if (o >= 0 && o != j) return false;
        }
        return true;
    }

    SearchState apply(const SearchState& st, const Move& mv) const {
        SearchState next = st;
        auto erase_from = [&](std::vector<int>& vec, int v) {
            vec.erase(std::find(vec.begin(), vec.end(), v));
        };
        // candidate solves start from the parent support's minimizer
        auto eval = [&](int idx) {
            const FunctionOnSpace* warm = ev_.minimizer_of(st.supports[idx], false);
            next.logv[idx] = ev_.support_log_lambda(next.supports[idx], false, warm);
        };
        switch (mv.kind) {
            case Move::add:
                next.supports[mv.i].push_back(mv.v);
                next.owner[mv.v] = mv.i;
                eval(mv.i);
                break;
            case Move::remove:
                erase_from(next.supports[mv.i], mv.v);
                next.owner[mv.v] = -1;
                eval(mv.i);
                break;
            case Move::transfer:
                erase_from(next.supports[mv.i], mv.v);
                next.supports[mv.j].push_back(mv.v);
                next.owner[mv.v] = mv.j;
                eval(mv.i);
                eval(mv.j);
                break;
            case Move::shift:
                erase_from(next.supports[mv.i], mv.u);
                next.owner[mv.u] = -1;
                next.supports[mv.j].push_back(mv.v);
                next.owner[mv.v] = mv.j;
                eval(mv.i);
                eval(mv.j);
                break;
            case Move::shell: {
                bool any = false;
                for (int v = 0; v < ev_.space.size(); ++v)
                    if (next.owner[v] < 0 && in_omega_[v] && touches(next, v, mv.i) &&
                        vertex_free_for(next, v, mv.i)) {
                        next.supports[mv.i].push_back(v);
                        next.owner[v] = mv.i;
                        any = true;
                    }
                if (!any) return SearchState{}; // no-op marker
                eval(mv.i);
                break;
            }
        }
        return next;
    }

    bool touches(const SearchState& st, int v, int i) const {
        for (auto [ei, u] : ev_.space.incident(v))
            if (st.owner[u] == i) return true;
        return false;
    }

    FamilyEval& ev_;
    Objective obj_;
    std::vector<char> in_omega_;
};

// Seed supports from packing balls, trimmed to a valid family.
DisjointFamily seed_family(const MetricMeasureSpace& space,
                           const std::optional<std::vector<int>>& ambient, int K,
                           double ball_fraction) {
    std::vector<int> centers;
    double r;
    if (ambient) {
        InpackResult ir = inpack(space, *ambient, K);
        centers = ir.centers;
        r = ir.radius;
    } else {
        PackingResult pr = pack_radius(space, K, PackMode::auto_mode);
        centers = pr.centers;
        r = pr.radius;
    }
    std::vector<char> in_omega(space.size(), 1);
    if (ambient) {
        std::fill(in_omega.begin(), in_omega.end(), 0);
        for (int v : *ambient) in_omega[v] = 1;
    }
    // nearest-center assignment within the shrunk balls
    std::vector<int> owner(space.size(), -1);
    for (int v = 0; v < space.size(); ++v) {
        if (!in_omega[v]) continue;
        double bd = kInf;
        int bi = -1;
        for (int i = 0; i < K; ++i) {
            double d = space.dist(centers[i], v);
            if (d < ball_fraction * r && d < bd) {
                bd = d;
                bi = i;
            }
        }
        owner[v] = bi;
    }
    for (int i = 0; i < K; ++i) owner[centers[i]] = i; // keep centers
    // drop cross-edge endpoints farther from their center until clean
    bool dirty = true;
    while (dirty) {
        dirty = false;
        for (auto& e : space.edges()) {
            int a = owner[e.u], b = owner[e.v];
            if (a >= 0 && b >= 0 && a != b) {
                double da = space.dist(centers[a], e.u);
                double db = space.dist(centers[b], e.v);
                int drop = (da > db || (da == db && a > b)) ? e.u : e.v;
                if (drop == centers[owner[drop]]) drop = (drop == e.u) ? e.v : e.u;
                if (drop == centers[owner[drop]]) continue; // both are centers
                owner[drop] = -1;
                dirty = true;
            }
        }
    }
    DisjointFamily fam;
    fam.ambient = ambient;
    fam.supports.assign(K, {});
    for (int v = 0; v < space.size(); ++v)
        if (owner[v] >= 0) fam.supports[owner[v]].push_back(v);
    for (auto& s : fam.supports)
        if (s.empty()) throw std::runtime_error("fakespec: packing seed degenerated");
    validate_family(space, fam); // centers 2r apart may still clash on coarse graphs
    return fam;
}

// last-resort feasible family: greedy singletons pairwise non-adjacent
DisjointFamily greedy_singletons(const MetricMeasureSpace& space,
                                 const std::optional<std::vector<int>>& ambient, int K) {
    std::vector<char> in_omega(space.size(), 1);
    if (ambient) {
        std::fill(in_omega.begin(), in_omega.end(), 0);
        for (int v : *ambient) in_omega[v] = 1;
    }
    std::vector<char> blocked(space.size(), 0);
    DisjointFamily fam;
    fam.ambient = ambient;
    for (int v = 0; v < space.size() && static_cast<int>(fam.supports.size()) < K; ++v) {
        if (!in_omega[v] || blocked[v]) continue;
        fam.supports.push_back({v});
        blocked[v] = 1;
        for (auto [ei, u] : space.incident(v)) blocked[u] = 1;
    }
    if (static_cast<int>(fam.supports.size()) < K)
        throw std::runtime_error(
            "fakespec: infeasible, no room for " + std::to_string(K) +
            " pairwise non-adjacent supports");
    return fam;
}

FakeSpecResult optimize(const MetricMeasureSpace& space,
                        const std::optional<std::vector<int>>& ambient, int K, double p,
                        Strategy strategy, Objective obj, const FakespecConfig& cfg,
                        int k_for_bound) {
    if (K < 1) throw std::invalid_argument("fakespec: k must be >= 1");
    FamilyEval ev(space, p, cfg);

    if (strategy == Strategy::exhaustive) {
        if (space.size() > cfg.exhaustive_max_n)
            throw std::runtime_error(
                "fakespec: exhaustive refused for n > " +
                std::to_string(cfg.exhaustive_max_n) +
                " (raise exhaustive_max_n explicitly to override)");
        ExhaustiveOut ex = exhaustive_scan(ev, ambient, K);
        if (!ex.feasible)
            throw std::runtime_error("fakespec: infeasible, no family of " +
                                     std::to_string(K) + " non-adjacent supports exists");
        auto& best = obj == Objective::max_of ? ex.best_max : ex.best_mean;
        return finish_result(ev, family_from_masks(best.comp_masks, ambient),
                             Strategy::exhaustive, Certificate::exact, k_for_bound);
    }

    // local / anneal
    std::vector<DisjointFamily> seeds;
    try {
        seeds.push_back(seed_family(space, ambient, K, cfg.seed_ball_fraction));
    } catch (const std::exception&) {
    }
    if (static_cast<int>(cfg.warm_supports.size()) == K) {
        DisjointFamily warm{cfg.warm_supports, ambient};
        try {
            validate_family(space, warm);
            seeds.push_back(std::move(warm));
        } catch (const std::exception&) {
        }
    }
    if (seeds.empty()) seeds.push_back(greedy_singletons(space, ambient, K));

    std::vector<SearchState> start_states;
    for (auto& fam : seeds) {
        SearchState st;
        st.supports = fam.supports;
        st.logv.assign(K, 0.0);
        st.rebuild_owner(space.size());
        start_states.push_back(std::move(st));
    }
    uint64_t sidx = 0;
    if (obj == Objective::max_of) {
        // the mean objective walks through max-plateaus (balanced families);
        // its optimum seeds the max search
        LocalSearch ls_mean(ev, ambient, Objective::mean_of);
        size_t base = start_states.size();
        for (size_t i = 0; i < base; ++i)
            start_states.push_back(ls_mean.run(start_states[i], sidx++));
    }

    LocalSearch ls(ev, ambient, obj);
    SearchState best_state;
    double best_val = kInf;
    for (auto& st : start_states) {
        SearchState r = strategy == Strategy::anneal ? ls.anneal(st, sidx) : ls.run(st, sidx);
        auto sc = ls.score(r);
        if (sc.first < best_val) {
            best_val = sc.first;
            best_state = r;
        }
        ++sidx;
    }
    DisjointFamily fam;
    fam.ambient = ambient;
    fam.supports = best_state.supports;
    return finish_result(ev, std::move(fam), strategy, Certificate::upper_bound, k_for_bound);
}

} // namespace

FakeSpecResult lambda_bar(const MetricMeasureSpace& space, int k, double p, Strategy strategy,
                          const FakespecConfig& cfg) {
    return optimize(space, std::nullopt, k + 1, p, strategy, Objective::max_of, cfg, k);
}

FakeSpecResult lambda_under(const MetricMeasureSpace& space, int k, double p, Strategy strategy,
                            const FakespecConfig& cfg) {
    return optimize(space, std::nullopt, k + 1, p, strategy, Objective::mean_of, cfg, k);
}

FakeSpecResult lambda_bar_dirichlet(const MetricMeasureSpace& space,
                                    const std::vector<int>& omega, int k, double p,
                                    Strategy strategy, const FakespecConfig& cfg) {
    if (omega.empty() || static_cast<int>(omega.size()) >= space.size())
        throw std::invalid_argument("fakespec: Omega must be a proper nonempty subset");
    return optimize(space, omega, k, p, strategy, Objective::max_of, cfg, 0);
}

FakeSpecResult lambda_under_dirichlet(const MetricMeasureSpace& space,
                                      const std::vector<int>& omega, int k, double p,
                                      Strategy strategy, const FakespecConfig& cfg) {
    if (omega.empty() || static_cast<int>(omega.size()) >= space.size())
        throw std::invalid_argument("fakespec: Omega must be a proper nonempty subset");
    return optimize(space, omega, k, p, strategy, Objective::mean_of, cfg, 0);
}

PackingBound packing_upper_bound(const MetricMeasureSpace& space, int k, double p) {
    if (k < 1) throw std::invalid_argument("packing_upper_bound: k must be >= 1");
    const int K = k + 1;
    PackingResult pr = pack_radius(space, K, PackMode::auto_mode);
    const double r = pr.radius;

    // assign ball vertices to the nearest center, then trim cross edges by
    // dropping the endpoint with the smaller cone value
    std::vector<int> owner(space.size(), -1);
    for (int v = 0; v < space.size(); ++v) {
        double bd = kInf;
        int bi = -1;
        for (int i = 0; i < K; ++i) {
            double d = space.dist(pr.centers[i], v);
            if (d < r && d < bd) {
                bd = d;
                bi = i;
            }
        }
        owner[v] = bi;
    }
    for (int i = 0; i < K; ++i) owner[pr.centers[i]] = i;
    bool dirty = true;
    while (dirty) {
        dirty = false;
        for (auto& e : space.edges()) {
            int a = owner[e.u], b = owner[e.v];
            if (a >= 0 && b >= 0 && a != b) {
                double ca = r - space.dist(pr.centers[a], e.u);
                double cb = r - space.dist(pr.centers[b], e.v);
                int drop = (ca < cb || (ca == cb && a > b)) ? e.u : e.v;
                if (drop == pr.centers[owner[drop]]) drop = (drop == e.u) ? e.v : e.u;
                if (drop == pr.centers[owner[drop]]) {
                    throw std::runtime_error(
                        "packing_upper_bound: infeasible, packer balls collapse to "
                        "adjacent single vertices");
                }
                owner[drop] = -1;
                dirty = true;
            }
        }
    }
    DisjointFamily fam;
    fam.supports.assign(K, {});
    for (int v = 0; v < space.size(); ++v)
        if (owner[v] >= 0) fam.supports[owner[v]].push_back(v);
    PackingBound out;
    double worst = -kInf;
    for (int i = 0; i < K; ++i) {
        FunctionOnSpace u = cone_function(space, pr.centers[i], r);
        for (int v = 0; v < space.size(); ++v)
            if (owner[v] != i) u[v] = 0.0;
        double lg = rayleigh_log(space, u, p);
        out.per_set.push_back(std::exp(lg));
        worst = std::max(worst, lg);
    }
    canonicalize(fam);
    validate_family(space, fam);
    out.family = std::move(fam);
    out.log_value = worst;
    out.value = std::exp(worst);
    out.root = std::exp(worst / p);
    return out;
}

SpanReport span_identity_check(const MetricMeasureSpace& space, const DisjointFamily& family,
                               const std::vector<double>& t, double p,
                               const FakespecConfig& cfg) {
    validate_family(space, family);
    if (t.size() != family.supports.size())
        throw std::invalid_argument("span_identity_check: weight count != support count");
    FamilyEval ev(space, p, cfg);
    std::vector<FunctionOnSpace> u;
    std::vector<double> energies;
    EnergyConfig e = cfg.energy;
    e.p = p;
    e.restarts = cfg.final_restarts;
    e.seed = cfg.seed;
    for (auto& s : family.supports) {
        EigenResult r = dirichlet_eig1(space, s, e);
        double nrm = p_norm(space, r.minimizer, p);
        for (double& x : r.minimizer) x /= nrm;
        energies.push_back(p_energy(space, r.minimizer, p));
        u.push_back(std::move(r.minimizer));
    }
    FunctionOnSpace g(space.size(), 0.0);
    for (size_t i = 0; i < u.size(); ++i)
        for (int v = 0; v < space.size(); ++v) g[v] += t[i] * u[i][v];

    SpanReport rep;
    double tp = 0.0, te = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
        double a = std::pow(std::abs(t[i]), p);
        tp += a;
        te += a * energies[i];
    }
    rep.norm_lhs = std::pow(p_norm(space, g, p), p);
    rep.norm_rhs = tp;
    rep.energy_lhs = p_energy(space, g, p);
    rep.energy_rhs = te;
    auto rel = [](double a, double b) {
        double s = std::max({std::abs(a), std::abs(b), 1e-300});
        return std::abs(a - b) / s;
    };
    rep.rel_err_norm = rel(rep.norm_lhs, rep.norm_rhs);
    rep.rel_err_energy = rel(rep.energy_lhs, rep.energy_rhs);
    double mx = 0.0;
    for (auto& ui : u) mx = std::max(mx, rayleigh(space, ui, p));
    rep.max_lambda = mx;
    rep.quotient = rayleigh(space, g, p);
    rep.quotient_bounded = rep.quotient <= mx * (1.0 + 1e-9) + 1e-300;
    return rep;
}

} // namespace packspec
