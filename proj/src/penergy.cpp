#include "packspec/penergy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "packspec/rng.hpp"

namespace packspec {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_p(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("p must be > 1");
    if (p > 256.0) throw std::invalid_argument("p is capped at 256");
}
} // namespace

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::degenerate: return "degenerate";
    }
    return "?";
}

double log_p_norm_pow(const MetricMeasureSpace& space, const FunctionOnSpace& f, double p) {
    double sup = 0.0;
    for (double x : f) sup = std::max(sup, std::abs(x));
    if (sup == 0.0) return -kInf;
    double s = 0.0;
    for (int x = 0; x < space.size(); ++x) {
        double t = std::abs(f[x]) / sup;
        if (t > 0.0) s += space.vertex_measure(x) * std::exp(p * std::log(t));
    }
    return p * std::log(sup) + std::log(s);
}

double log_p_energy(const MetricMeasureSpace& space, const FunctionOnSpace& f, double p) {
    double smax = space.max_edge_slope(f);
    if (smax == 0.0) return -kInf;
    double s = 0.0;
    for (auto& e : space.edges()) {
        double t = std::abs(f[e.u] - f[e.v]) / e.length / smax;
        if (t > 0.0) s += e.measure * std::exp(p * std::log(t));
    }
    return p * std::log(smax) + std::log(s);
}

double p_norm(const MetricMeasureSpace& space, const FunctionOnSpace& f, double p) {
    check_p(p);
    validate_function(space, f);
    double lg = log_p_norm_pow(space, f, p);
    return lg == -kInf ? 0.0 : std::exp(lg / p);
}

double p_energy(const MetricMeasureSpace& space, const FunctionOnSpace& f, double p) {
    check_p(p);
    validate_function(space, f);
    double lg = log_p_energy(space, f, p);
    return lg == -kInf ? 0.0 : std::exp(lg);
}

double rayleigh_log(const MetricMeasureSpace& space, const FunctionOnSpace& f, double p) {
    check_p(p);
    double ln = log_p_norm_pow(space, f, p);
    if (ln == -kInf) throw std::invalid_argument("rayleigh: f must be nonzero");
    double le = log_p_energy(space, f, p);
    return le == -kInf ? -kInf : le - ln;
}

double rayleigh(const MetricMeasureSpace& space, const FunctionOnSpace& f, double p) {
    double lr = rayleigh_log(space, f, p);
    return lr == -kInf ? 0.0 : std::exp(lr);
}

FunctionOnSpace cone_function(const MetricMeasureSpace& space, int x, double r) {
    if (x < 0 || x >= space.size()) throw std::invalid_argument("cone_function: bad center");
    FunctionOnSpace f(space.size(), 0.0);
    for (int y = 0; y < space.size(); ++y) f[y] = std::max(r - space.dist(x, y), 0.0);
    return f;
}

// ---------------------------------------------------------------------------
// solver internals

namespace {

struct Component {
    std::vector<int> verts;
};

std::vector<Component> split_components(const MetricMeasureSpace& space,
                                        const std::vector<int>& A) {
    std::vector<char> inA(space.size(), 0), seen(space.size(), 0);
    for (int v : A) {
        if (v < 0 || v >= space.size()) throw std::invalid_argument("support: bad vertex index");
        if (inA[v]) throw std::invalid_argument("support: duplicate vertex");
        inA[v] = 1;
    }
    std::vector<Component> comps;
    std::vector<int> stack;
    for (int s : A) {
        if (seen[s]) continue;
        Component c;
        stack.push_back(s);
        seen[s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            c.verts.push_back(v);
            for (auto [ei, u] : space.incident(v))
                if (inA[u] && !seen[u]) {
                    seen[u] = 1;
                    stack.push_back(u);
                }
        }
        std::sort(c.verts.begin(), c.verts.end());
        comps.push_back(std::move(c));
    }
    return comps;
}

// Scaled evaluation of log R and its gradient restricted to the component.
// Slopes and values are divided by their maxima before exponentiation, so the
// path stays finite for p up to 256.
struct ComponentProblem {
    const MetricMeasureSpace& space;
    std::vector<int> verts;          // component vertices (sorted)
    std::vector<int> pos;            // vertex -> local index, -1 outside
    struct LocalEdge { int a, b; double mu, len; }; // b = -1 means boundary
    std::vector<LocalEdge> ledges;
    double p;

    ComponentProblem(const MetricMeasureSpace& s, std::vector<int> vv, double pp)
        : space(s), verts(std::move(vv)), pos(s.size(), -1), p(pp) {
        for (int i = 0; i < static_cast<int>(verts.size()); ++i) pos[verts[i]] = i;
        std::vector<char> counted(space.edges().size(), 0);
        for (int v : verts)
            for (auto [ei, u] : space.incident(v)) {
                if (counted[ei]) continue;
                counted[ei] = 1;
                auto& e = space.edges()[ei];
                int a = pos[e.u], b = pos[e.v];
                if (a < 0) std::swap(a, b);
                ledges.push_back({a, b, e.measure, e.length});
            }
    }

    double log_R(const std::vector<double>& f) const {
        double smax = 0.0;
        for (auto& e : ledges) {
            double d = std::abs(f[e.a] - (e.b >= 0 ? f[e.b] : 0.0)) / e.len;
            smax = std::max(smax, d);
        }
        double fmax = 0.0;
        for (double x : f) fmax = std::max(fmax, x);
        if (fmax == 0.0) return kInf;
        if (smax == 0.0) return -kInf;
        double E = 0.0;
        for (auto& e : ledges) {
            double t = std::abs(f[e.a] - (e.b >= 0 ? f[e.b] : 0.0)) / (e.len * smax);
            if (t > 0.0) {
                double lt = p * std::log(t);
                if (lt > -46.0) E += e.mu * std::exp(lt);
            }
        }
        double N = 0.0;
        for (size_t i = 0; i < f.size(); ++i) {
            double t = f[i] / fmax;
            if (t > 0.0) {
                double lt = p * std::log(t);
                if (lt > -46.0) N += space.vertex_measure(verts[i]) * std::exp(lt);
            }
        }
        return p * (std::log(smax) - std::log(fmax)) + std::log(E) - std::log(N);
    }

    // gradient of log R; returns false when degenerate (f == 0 or flat)
    bool grad_log_R(const std::vector<double>& f, std::vector<double>& g) const {
        double smax = 0.0;
        for (auto& e : ledges) {
            double d = std::abs(f[e.a] - (e.b >= 0 ? f[e.b] : 0.0)) / e.len;
            smax = std::max(smax, d);
        }
        double fmax = 0.0;
        for (double x : f) fmax = std::max(fmax, x);
        if (smax == 0.0 || fmax == 0.0) return false;

        double E = 0.0, N = 0.0;
        std::vector<double> ge(f.size(), 0.0), gn(f.size(), 0.0);
        for (auto& e : ledges) {
            double diff = f[e.a] - (e.b >= 0 ? f[e.b] : 0.0);
            double t = std::abs(diff) / (e.len * smax);
            if (t <= 0.0) continue;
            double lt = p * std::log(t);
            if (lt <= -46.0) continue;
            double tp = std::exp(lt);
            E += e.mu * tp;
            // d/df_a of mu*(|diff|/len)^p, divided by smax^p
            double d1 = e.mu * p * (tp / t) / (e.len * smax) * (diff > 0 ? 1.0 : -1.0);
            ge[e.a] += d1;
            if (e.b >= 0) ge[e.b] -= d1;
        }
        for (size_t i = 0; i < f.size(); ++i) {
            double t = f[i] / fmax;
            if (t > 0.0) {
                double lt = p * std::log(t);
                if (lt <= -46.0) continue;
                double tp = std::exp(lt);
                N += space.vertex_measure(verts[i]) * tp;
                gn[i] = space.vertex_measure(verts[i]) * p * (tp / t) / fmax;
            }
        }
        if (E <= 0.0 || N <= 0.0) return false;
        for (size_t i = 0; i < f.size(); ++i) g[i] = ge[i] / E - gn[i] / N;
        return true;
    }
};

struct StartResult {
    double log_lambda = kInf;
    std::vector<double> f;
    int iterations = 0;
    bool converged = false;
};

StartResult descend(const ComponentProblem& prob, std::vector<double> f,
                    const EnergyConfig& cfg) {
    const int m = static_cast<int>(f.size());
    auto normalize = [&](std::vector<double>& x) {
        double mx = 0.0;
        for (double v : x) mx = std::max(mx, v);
        if (mx > 0.0)
            for (double& v : x) v /= mx;
    };
    for (double& v : f) v = std::max(v, 0.0);
    normalize(f);
    double cur = prob.log_R(f);
    if (!std::isfinite(cur)) {
        // flat start: bump the first vertex
        std::fill(f.begin(), f.end(), 0.0);
        f[0] = 1.0;
        cur = prob.log_R(f);
    }

    std::vector<double> g(m), gprev(m), fprev(m), trial(m);
    double step = 0.05;
    bool have_prev = false;
    const double tol_log = std::log1p(cfg.tol) * 0.1;
    int calm = 0;
    StartResult out;
    int it = 0;
    for (; it < cfg.max_iter; ++it) {
        if (!prob.grad_log_R(f, g)) break;
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax == 0.0) {
            out.converged = true;
            break;
        }
        // Barzilai-Borwein spectral step from the last accepted move, with a
        // monotone backtracking safeguard
        if (have_prev) {
            double sy = 0.0, yy = 0.0;
            for (int i = 0; i < m; ++i) {
                double si = f[i] - fprev[i], yi = g[i] - gprev[i];
                sy += si * yi;
                yy += yi * yi;
            }
            if (sy > 0.0 && yy > 0.0) step = std::clamp(sy / yy * gmax, 1e-12, 1e4);
        }
        fprev = f;
        gprev = g;
        bool accepted = false;
        double t = step;
        for (int bt = 0; bt < 70; ++bt) {
            for (int i = 0; i < m; ++i) trial[i] = std::max(f[i] - t * g[i] / gmax, 0.0);
            normalize(trial);
            double val = prob.log_R(trial);
            if (std::isfinite(val) && val < cur) {
                double drop = cur - val;
                f.swap(trial);
                cur = val;
                step = t * 1.4;
                accepted = true;
                have_prev = true;
                calm = (drop < tol_log) ? calm + 1 : 0;
                break;
            }
            t *= 0.4;
            if (t < 1e-17) break;
        }
        if (!accepted) {
            out.converged = true; // no descent direction at machine resolution
            break;
        }
        if (calm >= 12) {
            out.converged = true;
            break;
        }
    }
    out.iterations = it;
    out.log_lambda = cur;
    out.f = std::move(f);
    return out;
}

struct ComponentSolveOut {
    double log_lambda = kInf;
    std::vector<double> f; // local values, sup-normalized
    int iterations = 0;
    SolveStatus status = SolveStatus::converged;
    double spread = 0.0;
};

double spike_log_lambda(const MetricMeasureSpace& space, int v, double p) {
    // single-vertex support: R is independent of the spike height
    double lmax = 0.0;
    for (auto [ei, u] : space.incident(v))
        lmax = std::max(lmax, 1.0 / space.edges()[ei].length);
    double s = 0.0;
    for (auto [ei, u] : space.incident(v)) {
        auto& e = space.edges()[ei];
        s += e.measure * std::exp(p * std::log(1.0 / e.length / lmax));
    }
    return p * std::log(lmax) + std::log(s) - std::log(space.vertex_measure(v));
}

double p2_exact_component(const MetricMeasureSpace& space, const std::vector<int>& verts,
                          std::vector<double>* evec) {
    const int m = static_cast<int>(verts.size());
    std::vector<int> pos(space.size(), -1);
    for (int i = 0; i < m; ++i) pos[verts[i]] = i;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
    // Dirichlet form: sum_e mu (f_u - f_v)^2 / len^2 with f = 0 outside
    std::vector<char> counted(space.edges().size(), 0);
    std::vector<double> diag(m, 0.0);
    for (int i = 0; i < m; ++i)
        for (auto [ei, u] : space.incident(verts[i])) {
            if (counted[ei]) continue;
            counted[ei] = 1;
            auto& e = space.edges()[ei];
            double w = e.measure / (e.length * e.length);
            int a = pos[e.u], b = pos[e.v];
            if (a >= 0) diag[a] += w;
            if (b >= 0) diag[b] += w;
            if (a >= 0 && b >= 0) {
                B(a, b) -= w;
                B(b, a) -= w;
            }
        }
    for (int i = 0; i < m; ++i) B(i, i) += diag[i];
    // generalized problem L f = lambda M f via M^{-1/2} L M^{-1/2}
    Eigen::VectorXd ms(m);
    for (int i = 0; i < m; ++i) ms(i) = std::sqrt(space.vertex_measure(verts[i]));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) B(i, j) /= ms(i) * ms(j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    double lam = es.eigenvalues()(0);
    if (evec) {
        evec->assign(m, 0.0);
        double mx = 0.0;
        for (int i = 0; i < m; ++i) {
            (*evec)[i] = std::abs(es.eigenvectors()(i, 0) / ms(i));
            mx = std::max(mx, (*evec)[i]);
        }
        if (mx > 0.0)
            for (double& v : *evec) v /= mx;
    }
    return lam;
}

ComponentSolveOut solve_component(const MetricMeasureSpace& space, const std::vector<int>& verts,
                                  const EnergyConfig& cfg, bool allow_exact_p2) {
    ComponentSolveOut out;
    const int m = static_cast<int>(verts.size());
    if (m == 1) {
        out.log_lambda = spike_log_lambda(space, verts[0], cfg.p);
        out.f = {1.0};
        return out;
    }
    if (cfg.p == 2.0 && allow_exact_p2) {
        out.log_lambda = std::log(p2_exact_component(space, verts, &out.f));
        return out;
    }

    ComponentProblem prob(space, verts, cfg.p);

    // deterministic starts: cone at the deepest vertex, p=2 eigenfunction,
    // optional warm start
    std::vector<std::vector<double>> starts;
    {
        std::vector<char> inC(space.size(), 0);
        for (int v : verts) inC[v] = 1;
        int best = verts[0];
        double bd = -1.0;
        for (int v : verts) {
            double d = kInf;
            for (int y = 0; y < space.size(); ++y)
                if (!inC[y]) d = std::min(d, space.dist(v, y));
            if (d > bd) {
                bd = d;
                best = v;
            }
        }
        if (!std::isfinite(bd)) bd = space.diameter(); // support is the whole graph minus nothing
        std::vector<double> cone(m);
        for (int i = 0; i < m; ++i)
            cone[i] = std::max(bd + space.min_positive_distance_from(best) * 0.5 -
                                   space.dist(best, verts[i]),
                               0.0);
        starts.push_back(std::move(cone));
    }
    {
        std::vector<double> e2;
        p2_exact_component(space, verts, &e2);
        starts.push_back(std::move(e2));
    }
    if (!cfg.init.empty()) {
        std::vector<double> w(m);
        bool nonzero = false;
        for (int i = 0; i < m; ++i) {
            w[i] = std::max(cfg.init[verts[i]], 0.0);
            nonzero |= w[i] > 0.0;
        }
        if (nonzero) starts.push_back(std::move(w));
    }
    int want = std::max(cfg.restarts, static_cast<int>(starts.size()));
    int det = static_cast<int>(starts.size());
    for (int r = det; r < want; ++r) {
        SplitMix64 rng(mix_seeds(cfg.seed, static_cast<uint64_t>(r)));
        std::vector<double> f = starts[0]; // cone plus noise
        for (double& v : f) v = std::max(v + 0.35 * (rng.uniform() - 0.3), 0.0);
        starts.push_back(std::move(f));
    }

    std::vector<StartResult> results(starts.size());
    if (cfg.threads > 1 && starts.size() > 1) {
        std::vector<std::future<StartResult>> futs;
        for (auto& s0 : starts)
            futs.push_back(std::async(std::launch::async,
                                      [&prob, &cfg, s0] { return descend(prob, s0, cfg); }));
        for (size_t i = 0; i < futs.size(); ++i) results[i] = futs[i].get();
    } else {
        for (size_t i = 0; i < starts.size(); ++i) results[i] = descend(prob, starts[i], cfg);
    }
    double lo = kInf, hi = -kInf;
    bool any_conv = false;
    for (auto& r : results) {
        if (r.log_lambda < out.log_lambda) {
            out.log_lambda = r.log_lambda;
            out.f = r.f;
            out.iterations = r.iterations;
            out.status = r.converged ? SolveStatus::converged : SolveStatus::max_iter;
        }
        if (r.converged) {
            any_conv = true;
            lo = std::min(lo, r.log_lambda);
            hi = std::max(hi, r.log_lambda);
        }
    }
    out.spread = any_conv ? std::expm1(hi - lo) : 0.0;
    if (out.status == SolveStatus::converged && out.spread > 10.0 * cfg.tol)
        out.status = SolveStatus::degenerate;
    return out;
}

EigenResult solve_dirichlet(const MetricMeasureSpace& space, const std::vector<int>& A,
                            const EnergyConfig& cfg, bool allow_exact_p2) {
    check_p(cfg.p);
    if (cfg.tol <= 0.0) throw std::invalid_argument("tol must be positive");
    if (cfg.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    if (A.empty()) throw std::invalid_argument("dirichlet_eig1: empty support");
    if (static_cast<int>(A.size()) >= space.size())
        throw std::invalid_argument("dirichlet_eig1: support must be a proper subset");

    auto comps = split_components(space, A);
    EigenResult best;
    best.log_lambda = kInf;
    std::vector<int> best_comp;
    // Dirichlet value of a disjoint union is the min over components.
    for (auto& c : comps) {
        ComponentSolveOut r = solve_component(space, c.verts, cfg, allow_exact_p2);
        if (r.log_lambda < best.log_lambda) {
            best.log_lambda = r.log_lambda;
            best.iterations = r.iterations;
            best.status = r.status;
            best.restart_spread = r.spread;
            best_comp = c.verts;
            best.minimizer.assign(space.size(), 0.0);
            for (size_t i = 0; i < c.verts.size(); ++i) best.minimizer[c.verts[i]] = r.f[i];
        }
    }
    best.lambda = std::exp(best.log_lambda);
    best.lambda_root = std::exp(best.log_lambda / cfg.p);
    return best;
}

} // namespace

EigenResult dirichlet_eig1(const MetricMeasureSpace& space, const std::vector<int>& A,
                           const EnergyConfig& cfg) {
    return solve_dirichlet(space, A, cfg, true);
}

EigenResult dirichlet_eig1_descent(const MetricMeasureSpace& space, const std::vector<int>& A,
                                   const EnergyConfig& cfg) {
    return solve_dirichlet(space, A, cfg, false);
}

double dirichlet_eig_p2_exact(const MetricMeasureSpace& space, const std::vector<int>& A,
                              FunctionOnSpace* minimizer) {
    if (A.empty() || static_cast<int>(A.size()) >= space.size())
        throw std::invalid_argument("dirichlet_eig_p2_exact: support must be proper and nonempty");
    auto comps = split_components(space, A);
    double best = kInf;
    for (auto& c : comps) {
        std::vector<double> f;
        double lam = c.verts.size() == 1 ? std::exp(spike_log_lambda(space, c.verts[0], 2.0))
                                         : p2_exact_component(space, c.verts, &f);
        if (lam < best) {
            best = lam;
            if (minimizer) {
                minimizer->assign(space.size(), 0.0);
                if (c.verts.size() == 1)
                    (*minimizer)[c.verts[0]] = 1.0;
                else
                    for (size_t i = 0; i < c.verts.size(); ++i) (*minimizer)[c.verts[i]] = f[i];
            }
        }
    }
    return best;
}

} // namespace packspec
