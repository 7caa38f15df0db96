#include "packspec/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "packspec/morrey.hpp"
#include "packspec/packing.hpp"
#include "packspec/rng.hpp"

namespace packspec {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

SweepReport run_sweep(const MetricMeasureSpace& space,
                      const std::optional<std::vector<int>>& omega, int k,
                      const std::vector<double>& p_list, Strategy strategy,
                      const FakespecConfig& cfg) {
    if (p_list.empty()) throw std::invalid_argument("sweep: empty p list");
    for (size_t i = 0; i + 1 < p_list.size(); ++i)
        if (!(p_list[i] < p_list[i + 1]))
            throw std::invalid_argument("sweep: p list must be strictly increasing");
    if (!(p_list.front() > 1.0)) throw std::invalid_argument("sweep: p must exceed 1");

    SweepReport rep;
    rep.k = k;
    rep.dirichlet = omega.has_value();
    rep.space_id = space.meta().is_object() && space.meta().contains("generator")
                       ? space.meta()["generator"].get<std::string>()
                       : "space";
    if (omega) {
        InpackResult ir = inpack(space, *omega, k);
        rep.target = 1.0 / ir.radius;
    } else {
        PackingResult pr = pack_radius(space, k + 1, PackMode::auto_mode);
        rep.target = 1.0 / pr.radius;
    }

    std::vector<std::vector<int>> warm;
    for (double p : p_list) {
        SweepRow row;
        row.p = p;
        try {
            FakespecConfig c = cfg;
            c.energy.p = p;
            c.warm_supports = warm;
            // the bar and under searches at one p share solve caches
            c.memo = std::make_shared<FakespecMemo>();
            c.memo->p = p;
            FakeSpecResult rb = omega ? lambda_bar_dirichlet(space, *omega, k, p, strategy, c)
                                      : lambda_bar(space, k, p, strategy, c);
            FakeSpecResult ru = omega ? lambda_under_dirichlet(space, *omega, k, p, strategy, c)
                                      : lambda_under(space, k, p, strategy, c);
            row.lambda_bar_root = rb.lambda_bar_root;
            row.lambda_under_root = ru.lambda_under_root;
            row.p_times_root = p * rb.lambda_bar_root;
            row.bound_root = omega ? 0.0 : rb.packing_bound_root;
            warm = rb.family.supports;
        } catch (const std::exception& e) {
            row.status = e.what();
        }
        rep.rows.push_back(std::move(row));
    }

    ConvergenceEstimate ce = convergence_estimate(rep.rows);
    rep.extrapolated_limit = ce.c0;
    rep.extrapolation_residual = ce.max_residual;
    rep.extrapolation_refused = ce.refused;
    for (auto it = rep.rows.rbegin(); it != rep.rows.rend(); ++it)
        if (it->status == "ok") {
            rep.rel_err_at_pmax = std::abs(it->lambda_bar_root - rep.target) / rep.target;
            break;
        }
    rep.rel_err_extrapolated = std::abs(rep.extrapolated_limit - rep.target) / rep.target;
    return rep;
}

} // namespace

SweepReport p_sweep(const MetricMeasureSpace& space, int k, const std::vector<double>& p_list,
                    Strategy strategy, const FakespecConfig& cfg) {
    return run_sweep(space, std::nullopt, k, p_list, strategy, cfg);
}

SweepReport dirichlet_sweep(const MetricMeasureSpace& space, const std::vector<int>& omega,
                            int k, const std::vector<double>& p_list, Strategy strategy,
                            const FakespecConfig& cfg) {
    return run_sweep(space, omega, k, p_list, strategy, cfg);
}

ConvergenceEstimate convergence_estimate(const std::vector<SweepRow>& rows) {
    std::vector<std::pair<double, double>> pts; // (1/p, root)
    for (auto& r : rows)
        if (r.status == "ok") pts.push_back({1.0 / r.p, r.lambda_bar_root});
    ConvergenceEstimate ce;
    if (pts.size() < 3) {
        ce.refused = true;
        ce.c0 = pts.empty() ? 0.0 : pts.back().second;
        return ce;
    }
    size_t start = pts.size() / 2; // top half of the grid (largest p)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t m = pts.size() - start;
    for (size_t i = start; i < pts.size(); ++i) {
        sx += pts[i].first;
        sy += pts[i].second;
        sxx += pts[i].first * pts[i].first;
        sxy += pts[i].first * pts[i].second;
    }
    double det = m * sxx - sx * sx;
    if (std::abs(det) < 1e-300) {
        ce.refused = true;
        ce.c0 = pts.back().second;
        return ce;
    }
    ce.c1 = (m * sxy - sx * sy) / det;
    ce.c0 = (sy - ce.c1 * sx) / m;
    for (size_t i = start; i < pts.size(); ++i)
        ce.max_residual = std::max(
            ce.max_residual, std::abs(ce.c0 + ce.c1 * pts[i].first - pts[i].second));
    return ce;
}

// ---------------------------------------------------------------------------
// audit

namespace {

struct AuditSink {
    std::vector<AuditRow>& rows;
    const AuditTamper* tamper;

    void check_le(const std::string& law, const std::string& inst, double lhs, double rhs,
                  double tol) {
        if (tamper && tamper->law == law) lhs *= tamper->lhs_factor;
        AuditRow r{law, inst, lhs, rhs, tol, false};
        double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        r.pass = lhs <= rhs + tol * scale;
        rows.push_back(std::move(r));
    }

    void check_eq(const std::string& law, const std::string& inst, double lhs, double rhs,
                  double tol) {
        if (tamper && tamper->law == law) lhs *= tamper->lhs_factor;
        AuditRow r{law, inst, lhs, rhs, tol, false};
        double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        r.pass = std::abs(lhs - rhs) <= tol * scale;
        rows.push_back(std::move(r));
    }
};

// grow `count` pairwise disjoint random blobs; with `buffered` no blob touches
// another (one-vertex gap)
std::vector<std::vector<int>> random_blobs(const MetricMeasureSpace& space, int count,
                                           SplitMix64& rng, bool buffered) {
    const int n = space.size();
    std::vector<int> owner(n, -1);
    std::vector<std::vector<int>> blobs(count);
    std::vector<char> blocked(n, 0);
    int placed = 0;
    for (int attempt = 0; attempt < 8 * n && placed < count; ++attempt) {
        int v = static_cast<int>(rng.below(n));
        if (blocked[v]) continue;
        blobs[placed].push_back(v);
        owner[v] = placed;
        blocked[v] = 1;
        if (buffered)
            for (auto [ei, u] : space.incident(v)) blocked[u] = 1;
        ++placed;
    }
    if (placed < count) return {};
    // random growth
    int grow_steps = static_cast<int>(rng.below(n));
    for (int step = 0; step < grow_steps; ++step) {
        int b = static_cast<int>(rng.below(count));
        std::vector<int> cand;
        for (int v : blobs[b])
            for (auto [ei, u] : space.incident(v)) {
                if (owner[u] >= 0 || blocked[u]) continue;
                if (buffered) {
                    bool clash = false;
                    for (auto [ej, w] : space.incident(u))
                        if (owner[w] >= 0 && owner[w] != b) clash = true;
                    if (clash) continue;
                }
                cand.push_back(u);
            }
        if (cand.empty()) continue;
        int u = cand[rng.below(cand.size())];
        blobs[b].push_back(u);
        owner[u] = b;
    }
    int total = 0;
    for (auto& b : blobs) {
        std::sort(b.begin(), b.end());
        total += static_cast<int>(b.size());
    }
    if (total >= n) return {}; // blobs must stay proper subsets
    return blobs;
}

} // namespace

std::vector<AuditRow> audit(const MetricMeasureSpace& space, int k_max,
                            const std::vector<double>& p_list, Strategy strategy,
                            const FakespecConfig& cfg, uint64_t seed,
                            const AuditTamper* tamper) {
    std::vector<AuditRow> rows;
    AuditSink sink{rows, tamper};
    const double tol = 1e-9;
    const int n = space.size();
    SplitMix64 rng(mix_seeds(seed, 0xa0d17ULL));

    // --- packing laws (p-independent) ---
    {
        std::vector<double> packs;
        for (int K = 2; K <= std::min(n, k_max + 2); ++K)
            packs.push_back(pack_radius(space, K, PackMode::exact).radius);
        for (size_t i = 0; i + 1 < packs.size(); ++i)
            sink.check_le("pack-monotone", "K=" + std::to_string(i + 2), packs[i + 1],
                          packs[i], tol);
        for (size_t i = 0; i < packs.size(); ++i) {
            double greedy = pack_radius(space, static_cast<int>(i) + 2, PackMode::greedy).radius;
            sink.check_le("greedy-half", "K=" + std::to_string(i + 2), 0.5 * packs[i], greedy,
                          tol);
            sink.check_le("greedy-le-exact", "K=" + std::to_string(i + 2), greedy, packs[i],
                          tol);
        }
        // inradius vs pack over non-adjacent disjoint families (the discrete
        // form needs the one-vertex separation)
        for (int k = 1; k <= k_max; ++k) {
            if (k + 1 > n - 1) break;
            auto blobs = random_blobs(space, k + 1, rng, true);
            if (blobs.empty()) continue;
            double mininrad = kInf;
            for (auto& b : blobs) mininrad = std::min(mininrad, inradius(space, b));
            sink.check_le("inrad-vs-pack", "k=" + std::to_string(k), mininrad,
                          packs[static_cast<size_t>(k - 1)], tol);
        }
    }

    // --- doubling power law ---
    {
        double cd = space.doubling_constant();
        VolumeComparisonReport vr = volume_comparison_check(space, cd);
        sink.check_le("doubling-power", "C_D=" + std::to_string(cd),
                      static_cast<double>(vr.violations), 0.0, 0.0);
    }

    // --- Lipschitz realization on random functions ---
    for (int t = 0; t < 3; ++t) {
        FunctionOnSpace f(n);
        for (double& v : f) v = rng.uniform(-1.0, 1.0);
        double lg = space.lip_global(f);
        double ms = space.max_edge_slope(f);
        double ml = 0.0;
        for (int v = 0; v < n; ++v) ml = std::max(ml, space.lip_local(f, v));
        sink.check_eq("lip-realization", "edge-slope t=" + std::to_string(t), lg, ms, 1e-12);
        sink.check_eq("lip-realization", "local t=" + std::to_string(t), ml, ms, 1e-12);
    }

    // --- Holder mean monotonicity on random functions ---
    for (int t = 0; t < 3; ++t) {
        FunctionOnSpace f(n);
        for (double& v : f) v = rng.uniform(0.1, 2.0);
        for (size_t i = 0; i + 1 < p_list.size(); ++i)
            sink.check_le("holder-means",
                          "q=" + std::to_string(p_list[i]) + ",p=" +
                              std::to_string(p_list[i + 1]),
                          p_norm(space, f, p_list[i]), p_norm(space, f, p_list[i + 1]), tol);
    }

    // --- fake spectra across k and p ---
    struct KP {
        double log_bar = kInf;
        FakeSpecResult res;
        bool ok = false;
    };
    std::vector<std::vector<KP>> table(static_cast<size_t>(k_max) + 2,
                                       std::vector<KP>(p_list.size()));
    for (int k = 1; k <= k_max + 1; ++k)
        for (size_t pi = 0; pi < p_list.size(); ++pi) {
            FakespecConfig c = cfg;
            c.energy.p = p_list[pi];
            try {
                KP kp;
                kp.res = lambda_bar(space, k, p_list[pi], strategy, c);
                kp.log_bar = kp.res.log_lambda_bar;
                kp.ok = true;
                table[k][pi] = std::move(kp);
            } catch (const std::exception&) {
                // infeasible k on this space: skip dependent checks
            }
        }

    for (int k = 1; k <= k_max; ++k)
        for (size_t pi = 0; pi < p_list.size(); ++pi) {
            if (!table[k][pi].ok) continue;
            const double p = p_list[pi];
            const auto& res = table[k][pi].res;
            std::string inst = "k=" + std::to_string(k) + ",p=" + std::to_string(p);

            sink.check_le("under-le-bar", inst, res.lambda_under, res.lambda_bar, tol);
            sink.check_le("bar-le-packing-bound", inst, res.lambda_bar, res.packing_bound,
                          1e-9);
            if (table[k + 1][pi].ok)
                sink.check_le("bar-monotone-k", inst, res.lambda_bar,
                              table[k + 1][pi].res.lambda_bar, tol);
            if (pi + 1 < p_list.size() && table[k][pi + 1].ok)
                sink.check_le("lindqvist", inst, p * res.lambda_bar_root,
                              p_list[pi + 1] * table[k][pi + 1].res.lambda_bar_root, tol);

            // span identities on the optimal family
            {
                std::vector<double> tw(res.family.supports.size());
                for (double& w : tw) w = rng.uniform(0.25, 1.0);
                SpanReport sr = span_identity_check(space, res.family, tw, p, cfg);
                sink.check_le("span-identity", inst + " norm", sr.rel_err_norm, 1e-12, 0.0);
                sink.check_le("span-identity", inst + " energy", sr.rel_err_energy, 1e-12,
                              0.0);
            }
        }

    // --- union bound / union identity ---
    for (size_t pi = 0; pi < p_list.size(); ++pi) {
        auto blobs = random_blobs(space, 2, rng, true);
        if (blobs.empty()) continue;
        if (blobs[0].size() + blobs[1].size() >= static_cast<size_t>(n)) continue;
        EnergyConfig e = cfg.energy;
        e.p = p_list[pi];
        e.seed = cfg.seed;
        double la = dirichlet_eig1(space, blobs[0], e).lambda;
        double lb = dirichlet_eig1(space, blobs[1], e).lambda;
        std::vector<int> uni = blobs[0];
        uni.insert(uni.end(), blobs[1].begin(), blobs[1].end());
        double lu = dirichlet_eig1(space, uni, e).lambda;
        std::string inst = "p=" + std::to_string(p_list[pi]);
        sink.check_le("union-bound", inst, lu, std::max(la, lb), tol);
        sink.check_eq("union-identity", inst, lu, std::min(la, lb), tol);
    }

    // --- domain monotonicities ---
    for (size_t pi = 0; pi < p_list.size(); ++pi) {
        const double p = p_list[pi];
        FakespecConfig c = cfg;
        c.energy.p = p;
        // nested Omegas
        {
            std::vector<int> V, U;
            for (int v = 0; v < n; ++v)
                if (rng.uniform() < 0.75) V.push_back(v);
            if (!V.empty() && static_cast<int>(V.size()) < n) {
                for (int v : V)
                    if (rng.uniform() < 0.7) U.push_back(v);
                if (!U.empty()) {
                    for (int k = 1; k <= std::min(k_max, 2); ++k) {
                        double lv, lu;
                        try {
                            lv = lambda_bar_dirichlet(space, V, k, p, strategy, c).lambda_bar;
                        } catch (const std::exception&) {
                            continue;
                        }
                        try {
                            lu = lambda_bar_dirichlet(space, U, k, p, strategy, c).lambda_bar;
                        } catch (const std::exception&) {
                            lu = kInf; // no family fits in U: the infimum is empty
                        }
                        sink.check_le("domain-mono-nested",
                                      "k=" + std::to_string(k) + ",p=" + std::to_string(p),
                                      lv, lu, tol);
                    }
                }
            }
        }
        // closed space vs Dirichlet on a subset; disjoint-union bound
        for (int k = 1; k <= std::min(k_max, 2); ++k) {
            if (!table[k][pi].ok) continue;
            std::vector<int> U;
            for (int v = 0; v < n; ++v)
                if (rng.uniform() < 0.8) U.push_back(v);
            if (U.empty() || static_cast<int>(U.size()) >= n) continue;
            double rhs;
            try {
                rhs = lambda_bar_dirichlet(space, U, k + 1, p, strategy, c).lambda_bar;
            } catch (const std::exception&) {
                rhs = kInf;
            }
            sink.check_le("domain-mono-closed",
                          "k=" + std::to_string(k) + ",p=" + std::to_string(p),
                          table[k][pi].res.lambda_bar, rhs, tol);

            auto blobs = random_blobs(space, k + 1, rng, true);
            if (blobs.empty()) continue;
            std::vector<int> uni;
            double worst = 0.0;
            EnergyConfig e = cfg.energy;
            e.p = p;
            for (auto& b : blobs) {
                uni.insert(uni.end(), b.begin(), b.end());
                worst = std::max(worst, dirichlet_eig1(space, b, e).lambda);
            }
            if (static_cast<int>(uni.size()) >= n) continue;
            std::sort(uni.begin(), uni.end());
            double lhs;
            try {
                lhs = lambda_bar_dirichlet(space, uni, k + 1, p, strategy, c).lambda_bar;
            } catch (const std::exception&) {
                continue;
            }
            sink.check_le("disjoint-union-bound",
                          "k=" + std::to_string(k) + ",p=" + std::to_string(p), lhs, worst,
                          tol);
        }
    }

    return rows;
}

// ---------------------------------------------------------------------------
// refinement

RefinementStudy refinement_study(const std::string& generator, const std::string& quantity,
                                 const std::vector<int>& n_list, int k, double p,
                                 const FakespecConfig& cfg) {
    RefinementStudy st;
    st.quantity = quantity;
    const double pi_v = std::acos(-1.0);
    auto pi_p = [&](double pp) { return 2.0 * pi_v / (pp * std::sin(pi_v / pp)); };

    for (int n : n_list) {
        RefinementRow row;
        row.n = n;
        if (quantity == "dirichlet_lambda") {
            if (generator != "interval")
                throw std::invalid_argument("refine: dirichlet_lambda expects interval");
            auto sp = MetricMeasureSpace::interval(pi_v, n);
            std::vector<int> A;
            for (int v = 1; v + 1 < n; ++v) A.push_back(v);
            EnergyConfig e = cfg.energy;
            e.p = p;
            row.value = dirichlet_eig1(sp, A, e).lambda;
            row.reference = (p - 1.0) * std::pow(pi_p(p) / pi_v, p);
        } else if (quantity == "pack") {
            if (generator != "circle")
                throw std::invalid_argument("refine: pack expects circle");
            auto sp = MetricMeasureSpace::circle(2.0 * pi_v, n);
            row.value = pack_radius(sp, k + 1, PackMode::exact).radius;
            row.reference = 2.0 * pi_v / (2.0 * (k + 1));
        } else if (quantity == "diameter") {
            if (generator != "theta")
                throw std::invalid_argument("refine: diameter expects theta");
            auto sp = MetricMeasureSpace::theta_space(1.0 / n);
            row.value = sp.diameter();
            row.reference = pi_v + 2.0;
        } else if (quantity == "lambda_bar") {
            if (generator != "circle")
                throw std::invalid_argument("refine: lambda_bar expects circle");
            auto sp = MetricMeasureSpace::circle(2.0 * pi_v, n);
            FakespecConfig c = cfg;
            c.energy.p = p;
            row.value = lambda_bar(sp, k, p, Strategy::local, c).lambda_bar;
            row.reference =
                (p - 1.0) * std::pow(pi_p(p) * (k + 1) / (2.0 * pi_v), p);
        } else {
            throw std::invalid_argument("refine: unknown quantity " + quantity);
        }
        row.error = std::abs(row.value - row.reference);
        st.rows.push_back(row);
    }
    // slope of log error vs log n
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (auto& r : st.rows)
        if (r.error > 0.0) {
            double x = std::log(static_cast<double>(r.n)), y = std::log(r.error);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++m;
        }
    if (m >= 2) {
        double det = m * sxx - sx * sx;
        if (std::abs(det) > 1e-300) st.empirical_order = -(m * sxy - sx * sy) / det;
    }
    return st;
}

} // namespace packspec
