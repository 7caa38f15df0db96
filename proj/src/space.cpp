#include "packspec/space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>

#include "packspec/rng.hpp"

namespace packspec {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MetricMeasureSpace MetricMeasureSpace::build(int n, std::vector<Edge> edges,
                                             std::vector<double> vertex_measure,
                                             nlohmann::ordered_json meta) {
    if (n < 2) throw std::invalid_argument("space: need at least 2 vertices");
    if (static_cast<int>(vertex_measure.size()) != n)
        throw std::invalid_argument("space: measure size != vertex count");
    double msum = 0.0;
    for (double m : vertex_measure) {
        if (!(m > 0.0) || !std::isfinite(m))
            throw std::invalid_argument("space: vertex measure entries must be positive");
        msum += m;
    }
    double lsum = 0.0;
    for (auto& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n || e.u == e.v)
            throw std::invalid_argument("space: bad edge endpoints");
        if (!(e.length > 0.0) || !std::isfinite(e.length))
            throw std::invalid_argument("space: edge lengths must be positive");
        if (e.measure < 0.0 || !std::isfinite(e.measure))
            throw std::invalid_argument("space: edge measures must be nonnegative");
        lsum += e.length;
    }
    if (edges.empty()) throw std::invalid_argument("space: no edges");

    MetricMeasureSpace s;
    s.n_ = n;
    s.edges_ = std::move(edges);
    s.vm_ = std::move(vertex_measure);
    // idempotent: re-normalizing an already-normalized measure must not move bits
    if (std::abs(msum - 1.0) > 1e-12)
        for (double& m : s.vm_) m /= msum;
    for (auto& e : s.edges_)
        if (e.measure == 0.0) e.measure = e.length / lsum;
    s.adj_.assign(n, {});
    for (int i = 0; i < static_cast<int>(s.edges_.size()); ++i) {
        s.adj_[s.edges_[i].u].push_back({i, s.edges_[i].v});
        s.adj_[s.edges_[i].v].push_back({i, s.edges_[i].u});
    }
    s.meta_ = std::move(meta);
    s.compute_distances();
    return s;
}

void MetricMeasureSpace::compute_distances() {
    dist_.assign(static_cast<size_t>(n_) * n_, kInf);
    using QI = std::pair<double, int>;
    for (int src = 0; src < n_; ++src) {
        double* d = &dist_[static_cast<size_t>(src) * n_];
        std::priority_queue<QI, std::vector<QI>, std::greater<QI>> pq;
        d[src] = 0.0;
        pq.push({0.0, src});
        while (!pq.empty()) {
            auto [dv, v] = pq.top();
            pq.pop();
            if (dv > d[v]) continue;
            for (auto [ei, u] : adj_[v]) {
                double nd = dv + edges_[ei].length;
                if (nd < d[u]) {
                    d[u] = nd;
                    pq.push({nd, u});
                }
            }
        }
        for (int v = 0; v < n_; ++v)
            if (!std::isfinite(d[v]))
                throw std::invalid_argument("space: graph is disconnected");
    }
    // per-source runs can disagree in the last ulp; exact threshold searches
    // need bitwise symmetry
    for (int x = 0; x < n_; ++x)
        for (int y = x + 1; y < n_; ++y) {
            double d = std::min(dist_[static_cast<size_t>(x) * n_ + y],
                                dist_[static_cast<size_t>(y) * n_ + x]);
            dist_[static_cast<size_t>(x) * n_ + y] = d;
            dist_[static_cast<size_t>(y) * n_ + x] = d;
        }
}

double MetricMeasureSpace::diameter() const {
    double d = 0.0;
    for (double x : dist_) d = std::max(d, x);
    return d;
}

double MetricMeasureSpace::total_edge_length() const {
    double s = 0.0;
    for (auto& e : edges_) s += e.length;
    return s;
}

std::vector<int> MetricMeasureSpace::ball(int x, double r) const {
    std::vector<int> out;
    for (int y = 0; y < n_; ++y)
        if (dist(x, y) < r) out.push_back(y);
    return out;
}

double MetricMeasureSpace::ball_measure(int x, double r) const {
    double s = 0.0;
    for (int y = 0; y < n_; ++y)
        if (dist(x, y) < r) s += vm_[y];
    return s;
}

double MetricMeasureSpace::ball_measure_closed(int x, double r) const {
    double s = 0.0;
    for (int y = 0; y < n_; ++y)
        if (dist(x, y) <= r) s += vm_[y];
    return s;
}

double MetricMeasureSpace::doubling_constant() const {
    // For r in (c, c') between consecutive breakpoints, U_r = {d <= c} and
    // U_2r = {d <= 2c}; evaluating closed balls at each breakpoint covers all
    // regimes of the ratio.
    double best = 1.0;
    std::vector<double> crit;
    for (int x = 0; x < n_; ++x) {
        crit.clear();
        for (int y = 0; y < n_; ++y) {
            double d = dist(x, y);
            if (d > 0.0) {
                crit.push_back(d);
                crit.push_back(d / 2.0);
            }
        }
        std::sort(crit.begin(), crit.end());
        crit.erase(std::unique(crit.begin(), crit.end()), crit.end());
        for (double c : crit) {
            double num = ball_measure_closed(x, 2.0 * c);
            double den = ball_measure_closed(x, c);
            best = std::max(best, num / den);
        }
    }
    return best;
}

double MetricMeasureSpace::lip_local(const std::vector<double>& f, int x) const {
    double m = 0.0;
    for (auto [ei, y] : adj_[x])
        m = std::max(m, std::abs(f[x] - f[y]) / edges_[ei].length);
    return m;
}

double MetricMeasureSpace::lip_global(const std::vector<double>& f) const {
    double m = 0.0;
    for (int x = 0; x < n_; ++x)
        for (int y = x + 1; y < n_; ++y)
            m = std::max(m, std::abs(f[x] - f[y]) / dist(x, y));
    return m;
}

double MetricMeasureSpace::max_edge_slope(const std::vector<double>& f) const {
    double m = 0.0;
    for (auto& e : edges_)
        m = std::max(m, std::abs(f[e.u] - f[e.v]) / e.length);
    return m;
}

std::vector<double> MetricMeasureSpace::distance_values() const {
    std::vector<double> v;
    v.reserve(static_cast<size_t>(n_) * (n_ - 1) / 2);
    for (int x = 0; x < n_; ++x)
        for (int y = x + 1; y < n_; ++y) v.push_back(dist(x, y));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

double MetricMeasureSpace::min_positive_distance_from(int x) const {
    double m = kInf;
    for (int y = 0; y < n_; ++y) {
        double d = dist(x, y);
        if (d > 0.0) m = std::min(m, d);
    }
    return m;
}

// ---------------------------------------------------------------------------
// generators

namespace {

MetricMeasureSpace build_1d(int n, const std::vector<MetricMeasureSpace::Edge>& raw,
                            nlohmann::ordered_json meta) {
    // cell measure: half of incident edge lengths per vertex
    std::vector<double> cell(n, 0.0);
    double total = 0.0;
    for (auto& e : raw) {
        cell[e.u] += e.length / 2.0;
        cell[e.v] += e.length / 2.0;
        total += e.length;
    }
    std::vector<MetricMeasureSpace::Edge> edges = raw;
    for (auto& e : edges) e.measure = e.length / total;
    meta["total_length"] = total;
    return MetricMeasureSpace::build(n, std::move(edges), std::move(cell), std::move(meta));
}

} // namespace

MetricMeasureSpace MetricMeasureSpace::circle(double L, int n) {
    if (n < 2 || !(L > 0.0)) throw std::invalid_argument("circle: need n >= 2, L > 0");
    double h = L / n;
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, h, 0.0});
    nlohmann::ordered_json meta{{"generator", "circle"}, {"L", L}, {"n", n}};
    return build_1d(n, edges, std::move(meta));
}

MetricMeasureSpace MetricMeasureSpace::interval(double L, int n) {
    if (n < 2 || !(L > 0.0)) throw std::invalid_argument("interval: need n >= 2, L > 0");
    double h = L / (n - 1);
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, h, 0.0});
    nlohmann::ordered_json meta{{"generator", "interval"}, {"L", L}, {"n", n}};
    return build_1d(n, edges, std::move(meta));
}

MetricMeasureSpace MetricMeasureSpace::torus_grid(double L1, double L2, int n1, int n2) {
    if (n1 < 2 || n2 < 2 || !(L1 > 0.0) || !(L2 > 0.0))
        throw std::invalid_argument("torus_grid: need n1,n2 >= 2 and positive lengths");
    int n = n1 * n2;
    double h1 = L1 / n1, h2 = L2 / n2;
    auto id = [&](int i, int j) { return (i % n1) * n2 + (j % n2); };
    std::vector<Edge> edges;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            edges.push_back({id(i, j), id(i + 1, j), h1, 0.0});
            edges.push_back({id(i, j), id(i, j + 1), h2, 0.0});
        }
    std::vector<double> m(n, 1.0 / n);
    nlohmann::ordered_json meta{{"generator", "torus_grid"},
                                {"L1", L1},
                                {"L2", L2},
                                {"n1", n1},
                                {"n2", n2},
                                {"area", L1 * L2}};
    return MetricMeasureSpace::build(n, std::move(edges), std::move(m), std::move(meta));
}

MetricMeasureSpace MetricMeasureSpace::theta_space(double h) {
    if (!(h > 0.0) || h > 1.0) throw std::invalid_argument("theta_space: need 0 < h <= 1");
    const double pi = std::acos(-1.0);
    int nseg = std::max(1, static_cast<int>(std::lround(1.0 / h)));
    int narc = std::max(2, static_cast<int>(std::lround(pi / h)));
    double hseg = 1.0 / nseg, harc = pi / narc;

    // vertex layout: [tipA, A internals, v-, upper arc internals, lower arc
    // internals, v+, C internals, tipC]
    int idx = 0;
    int tipA = idx++;
    std::vector<int> aInt(nseg - 1);
    for (auto& v : aInt) v = idx++;
    int vm = idx++;
    std::vector<int> up(narc - 1), lo(narc - 1);
    for (auto& v : up) v = idx++;
    for (auto& v : lo) v = idx++;
    int vp = idx++;
    std::vector<int> cInt(nseg - 1);
    for (auto& v : cInt) v = idx++;
    int tipC = idx++;
    int n = idx;

    std::vector<Edge> edges;
    auto chain = [&](const std::vector<int>& mid, int a, int b, double len) {
        int prev = a;
        for (int v : mid) {
            edges.push_back({prev, v, len, 0.0});
            prev = v;
        }
        edges.push_back({prev, b, len, 0.0});
    };
    chain(aInt, tipA, vm, hseg);
    chain(up, vm, vp, harc);
    chain(lo, vm, vp, harc);
    chain(cInt, vp, tipC, hseg);

    nlohmann::ordered_json meta{{"generator", "theta_space"}, {"h", h},
                                {"tips", {tipA, tipC}}};
    return build_1d(n, edges, std::move(meta));
}

MetricMeasureSpace MetricMeasureSpace::random_geometric(int n, double radius, uint64_t seed) {
    if (n < 2 || !(radius > 0.0))
        throw std::invalid_argument("random_geometric: need n >= 2, radius > 0");
    SplitMix64 rng(seed);
    std::vector<double> px(n), py(n);
    for (int i = 0; i < n; ++i) {
        px[i] = rng.uniform();
        py[i] = rng.uniform();
    }
    auto euclid = [&](int a, int b) {
        double dx = px[a] - px[b], dy = py[a] - py[b];
        return std::sqrt(dx * dx + dy * dy);
    };
    std::vector<Edge> edges;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            double d = euclid(a, b);
            if (d <= radius && d > 0.0) edges.push_back({a, b, d, 0.0});
        }
    // stitch components with shortest cross links until connected
    std::vector<int> comp(n);
    auto label = [&]() {
        std::fill(comp.begin(), comp.end(), -1);
        int c = 0;
        std::vector<int> stack;
        std::vector<std::vector<int>> nb(n);
        for (auto& e : edges) {
            nb[e.u].push_back(e.v);
            nb[e.v].push_back(e.u);
        }
        for (int s = 0; s < n; ++s) {
            if (comp[s] >= 0) continue;
            stack.push_back(s);
            comp[s] = c;
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                for (int u : nb[v])
                    if (comp[u] < 0) {
                        comp[u] = c;
                        stack.push_back(u);
                    }
            }
            ++c;
        }
        return c;
    };
    while (label() > 1) {
        double bd = kInf;
        int ba = -1, bb = -1;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (comp[a] != comp[b]) {
                    double d = euclid(a, b);
                    if (d < bd && d > 0.0) {
                        bd = d;
                        ba = a;
                        bb = b;
                    }
                }
        if (ba < 0) throw std::invalid_argument("random_geometric: coincident points");
        edges.push_back({ba, bb, bd, 0.0});
    }
    nlohmann::ordered_json meta{{"generator", "random_geometric"},
                                {"n", n},
                                {"radius", radius},
                                {"seed", seed}};
    return build_1d(n, edges, std::move(meta));
}

// ---------------------------------------------------------------------------
// io

nlohmann::ordered_json MetricMeasureSpace::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["vertices"] = n_;
    auto ej = nlohmann::ordered_json::array();
    auto mj = nlohmann::ordered_json::array();
    for (auto& e : edges_) {
        ej.push_back({e.u, e.v, e.length});
        mj.push_back(e.measure);
    }
    j["edges"] = std::move(ej);
    j["measure"] = vm_;
    j["edge_measure"] = std::move(mj);
    j["meta"] = meta_;
    return j;
}

MetricMeasureSpace MetricMeasureSpace::from_json(const nlohmann::ordered_json& j) {
    if (!j.contains("vertices") || !j.contains("edges") || !j.contains("measure"))
        throw std::invalid_argument("space file: missing vertices/edges/measure");
    int n = j.at("vertices").get<int>();
    std::vector<Edge> edges;
    for (auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3)
            throw std::invalid_argument("space file: edge entries must be [u,v,length]");
        edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>(), 0.0});
    }
    if (j.contains("edge_measure") && !j.at("edge_measure").is_null()) {
        auto& em = j.at("edge_measure");
        if (em.size() != edges.size())
            throw std::invalid_argument("space file: edge_measure size mismatch");
        for (size_t i = 0; i < edges.size(); ++i) edges[i].measure = em[i].get<double>();
    }
    std::vector<double> m = j.at("measure").get<std::vector<double>>();
    nlohmann::ordered_json meta = j.value("meta", nlohmann::ordered_json{});
    return build(n, std::move(edges), std::move(m), std::move(meta));
}

MetricMeasureSpace MetricMeasureSpace::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open space file: " + path);
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("malformed space file " + path + ": " + e.what());
    }
    return from_json(j);
}

void MetricMeasureSpace::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write space file: " + path);
    out << to_json().dump(2) << "\n";
}

void validate_function(const MetricMeasureSpace& space, const FunctionOnSpace& f) {
    if (static_cast<int>(f.size()) != space.size())
        throw std::invalid_argument("function length != vertex count");
    for (double x : f)
        if (!std::isfinite(x)) throw std::invalid_argument("function has non-finite entries");
}

} // namespace packspec
