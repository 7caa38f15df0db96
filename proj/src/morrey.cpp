#include "packspec/morrey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "packspec/penergy.hpp"
#include "packspec/rng.hpp"

namespace packspec {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MorreyConstants morrey_constants(double C_D, double C_P, double sigma, double p, double diam) {
    if (!(C_D > 1.0)) throw std::invalid_argument("morrey_constants: C_D must exceed 1");
    if (!(C_P > 0.0)) throw std::invalid_argument("morrey_constants: C_P must be positive");
    if (!(sigma >= 1.0)) throw std::invalid_argument("morrey_constants: sigma must be >= 1");
    if (!(diam > 0.0)) throw std::invalid_argument("morrey_constants: diam must be positive");
    MorreyConstants mc;
    mc.s = std::log2(C_D);
    if (!(p > mc.s))
        throw std::invalid_argument("morrey_constants: requires p > s = log2(C_D)");
    mc.p = p;
    mc.diam = diam;
    const double s = mc.s;
    mc.C = (1.0 + C_D) * C_D * C_P / sigma;
    mc.C_prime = std::pow(2.0, 4.0 + 1.0 / p) * std::pow(3.0, -1.0 + 2.0 * s / p) *
                 std::pow(C_D, 1.0 / p) * std::pow(sigma, 1.0 + s / p);
    mc.C_dprime_stated = std::pow(2.0, 6.0 + 1.0 / p) * std::pow(3.0, 1.0 - s / p) *
                         std::pow(C_D, 1.0 + 3.0 / p) * (1.0 + C_D) * C_P;
    mc.C_dprime_product = 4.0 * std::pow(3.0, -s / p) * mc.C * mc.C_prime *
                          std::pow(C_D, 2.0 / p) * std::pow(sigma, -s / p);
    mc.C_of_p = mc.C_dprime_stated * std::pow(diam, s / p);
    mc.note = "stated/product forms of C'' differ by the factor 3^(2-2s/p); "
              "the stated (larger for s<p) form is used in C(p)";
    return mc;
}

double riesz_potential(const MetricMeasureSpace& space, const FunctionOnSpace& h, double p,
                       double sigma, const std::vector<int>& omega, int x) {
    if (!(p > 0.0)) throw std::invalid_argument("riesz_potential: p must be positive");
    if (!(sigma >= 1.0)) throw std::invalid_argument("riesz_potential: sigma must be >= 1");
    if (omega.empty()) throw std::invalid_argument("riesz_potential: empty Omega");
    if (x < 0 || x >= space.size()) throw std::invalid_argument("riesz_potential: bad x");
    validate_function(space, h);

    double diam_omega = 0.0;
    for (size_t i = 0; i < omega.size(); ++i)
        for (size_t j = i + 1; j < omega.size(); ++j)
            diam_omega = std::max(diam_omega, space.dist(omega[i], omega[j]));
    if (diam_omega == 0.0) return 0.0; // no integer i with 2^i <= 0-ish range collapses

    const double cutoff = 2.0 * sigma * diam_omega;
    const int i_max = static_cast<int>(std::floor(std::log2(cutoff)));
    const double minpos = space.min_positive_distance_from(x);
    // largest i with 2^i < minpos: balls below it are {x}
    int i_tail = static_cast<int>(std::floor(std::log2(minpos)));
    while (std::exp2(i_tail) >= minpos) --i_tail;
    while (std::exp2(i_tail + 1) < minpos) ++i_tail;

    double total = 0.0;
    if (i_tail >= i_max) {
        // geometric sum over all admissible i
        return std::exp2(i_max + 1) * std::abs(h[x]);
    }
    total += std::exp2(i_tail + 1) * std::abs(h[x]);
    for (int i = i_tail + 1; i <= i_max; ++i) {
        double r = std::exp2(i);
        double mball = 0.0, acc = 0.0, hmax = 0.0;
        for (int y = 0; y < space.size(); ++y)
            if (space.dist(x, y) < r) hmax = std::max(hmax, std::abs(h[y]));
        for (int y = 0; y < space.size(); ++y)
            if (space.dist(x, y) < r) {
                mball += space.vertex_measure(y);
                if (hmax > 0.0 && std::abs(h[y]) > 0.0)
                    acc += space.vertex_measure(y) *
                           std::exp(p * std::log(std::abs(h[y]) / hmax));
            }
        if (hmax > 0.0 && acc > 0.0)
            total += r * hmax * std::exp(std::log(acc / mball) / p);
    }
    return total;
}

PoincareData poincare_estimate(const MetricMeasureSpace& space, double p0, double sigma,
                               const std::vector<FunctionOnSpace>& extra_family,
                               uint64_t seed) {
    if (!(p0 >= 1.0)) throw std::invalid_argument("poincare_estimate: p0 must be >= 1");
    if (!(sigma >= 1.0)) throw std::invalid_argument("poincare_estimate: sigma must be >= 1");
    const int n = space.size();

    std::vector<FunctionOnSpace> family = extra_family;
    // distance functions from a spread of base points
    int stride = std::max(1, n / 12);
    for (int x0 = 0; x0 < n; x0 += stride) {
        FunctionOnSpace f(n);
        for (int y = 0; y < n; ++y) f[y] = space.dist(x0, y);
        family.push_back(std::move(f));
        family.push_back(cone_function(space, x0, space.diameter() / 3.0));
    }
    // p=2 minimizer on a half-ish support
    {
        std::vector<int> A;
        for (int v = 0; v < n / 2 + 1 && v < n - 1; ++v) A.push_back(v);
        if (!A.empty()) {
            FunctionOnSpace f;
            dirichlet_eig_p2_exact(space, A, &f);
            family.push_back(std::move(f));
        }
    }
    // smoothed random profiles
    SplitMix64 rng(seed ^ 0x901CA4E5ULL);
    for (int t = 0; t < 4; ++t) {
        FunctionOnSpace f(n);
        for (double& v : f) v = rng.uniform();
        for (int round = 0; round < 2; ++round) {
            FunctionOnSpace g = f;
            for (int v = 0; v < n; ++v) {
                double s = f[v];
                int c = 1;
                for (auto [ei, u] : space.incident(v)) {
                    s += f[u];
                    ++c;
                }
                g[v] = s / c;
            }
            f = std::move(g);
        }
        family.push_back(std::move(f));
    }

    double best = 0.0;
    for (const auto& f : family) {
        std::vector<double> lip(n);
        for (int v = 0; v < n; ++v) lip[v] = space.lip_local(f, v);
        for (int x = 0; x < n; ++x) {
            std::vector<double> crit;
            for (int y = 0; y < n; ++y) {
                double d = space.dist(x, y);
                if (d > 0.0) crit.push_back(d);
            }
            std::sort(crit.begin(), crit.end());
            crit.erase(std::unique(crit.begin(), crit.end()), crit.end());
            for (double r : crit) {
                // closed balls: the sup over radii is attained just above r
                double mball = 0.0, favg = 0.0;
                for (int y = 0; y < n; ++y)
                    if (space.dist(x, y) <= r) {
                        mball += space.vertex_measure(y);
                        favg += space.vertex_measure(y) * f[y];
                    }
                favg /= mball;
                double osc = 0.0;
                for (int y = 0; y < n; ++y)
                    if (space.dist(x, y) <= r)
                        osc += space.vertex_measure(y) * std::abs(f[y] - favg);
                osc /= mball;
                double mb2 = 0.0, lp = 0.0;
                for (int y = 0; y < n; ++y)
                    if (space.dist(x, y) <= sigma * r) {
                        mb2 += space.vertex_measure(y);
                        lp += space.vertex_measure(y) * std::pow(lip[y], p0);
                    }
                if (lp <= 0.0) continue;
                double den = r * std::pow(lp / mb2, 1.0 / p0);
                best = std::max(best, osc / den);
            }
        }
    }
    PoincareData out;
    out.C_P = best;
    out.p_0 = p0;
    out.sigma = sigma;
    return out;
}

HolderReport holder_check(const MetricMeasureSpace& space, const FunctionOnSpace& f, double p,
                          const MorreyConstants& constants, double safety) {
    validate_function(space, f);
    double fmin = kInf, fmax = -kInf;
    for (double v : f) {
        fmin = std::min(fmin, v);
        fmax = std::max(fmax, v);
    }
    if (fmin == fmax) throw std::invalid_argument("holder_check: f must be non-constant");
    double Dfp = std::exp(log_p_energy(space, f, p) / p); // edge-gradient p-norm
    double ratio = 0.0;
    const double expo = 1.0 - constants.s / p;
    for (int x = 0; x < space.size(); ++x)
        for (int y = x + 1; y < space.size(); ++y) {
            double d = space.dist(x, y);
            ratio = std::max(ratio,
                             std::abs(f[x] - f[y]) / (Dfp * std::pow(d, expo)));
        }
    HolderReport rep;
    rep.max_ratio = ratio;
    rep.c_of_p = constants.C_of_p;
    rep.safety = safety;
    rep.bound = constants.C_of_p * safety; // C'' is linear in C_P
    rep.pass = ratio <= rep.bound;
    return rep;
}

VolumeComparisonReport volume_comparison_check(const MetricMeasureSpace& space, double C_D) {
    if (!(C_D >= 1.0)) throw std::invalid_argument("volume_comparison_check: C_D must be >= 1");
    const double s = std::log2(C_D);
    const int n = space.size();
    auto dv = space.distance_values();
    VolumeComparisonReport rep;
    for (int x = 0; x < n; ++x) {
        for (double r : dv) {
            // value just above the breakpoint: closed ball at r
            double mr = space.ball_measure_closed(x, r);
            for (int x2 = 0; x2 < n; ++x2) {
                if (space.dist(x, x2) > r) continue; // x' in the closed r-ball
                for (double r2 : dv) {
                    if (!(r2 <= r)) break; // dv sorted ascending
                    // value at the regime's right endpoint: open ball at r2
                    double mr2 = space.ball_measure(x2, r2);
                    if (mr2 <= 0.0) continue;
                    double lhs = mr / mr2;
                    double pr = std::pow(r / r2, s);
                    ++rep.checks;
                    double bound = (x2 == x ? 1.0 : 2.0) * C_D * pr;
                    rep.worst_margin = std::max(rep.worst_margin, lhs / bound);
                    if (lhs > bound * (1.0 + 1e-12)) ++rep.violations;
                }
            }
        }
    }
    rep.pass = rep.violations == 0;
    return rep;
}

} // namespace packspec
