#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "packspec/morrey.hpp"
#include "packspec/penergy.hpp"
#include "packspec/space.hpp"

using namespace packspec;

namespace {
const double PI = std::acos(-1.0);

// independent log-domain evaluation: accumulate exponents, exponentiate once
long double log_pow(long double base, long double e) { return e * std::log(base); }

struct LogEval {
    long double acc = 0.0L;
    LogEval& mul(long double base, long double e) {
        acc += log_pow(base, e);
        return *this;
    }
    double value() const { return static_cast<double>(std::exp(acc)); }
};
} // namespace

TEST_CASE("morrey constants: hand-checked instance") {
    auto mc = morrey_constants(4.0, 1.0, 2.0, 8.0);
    CHECK(mc.s == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(mc.C == doctest::Approx(10.0).epsilon(1e-15));

    // C' = 2^{4.125} 3^{-0.5} 4^{0.125} 2^{1.25}
    LogEval cp;
    cp.mul(2.0L, 4.125L).mul(3.0L, -0.5L).mul(4.0L, 0.125L).mul(2.0L, 1.25L);
    CHECK(mc.C_prime == doctest::Approx(cp.value()).epsilon(1e-12));

    LogEval cs; // stated C'': 2^{6+1/8} 3^{1-2/8} 4^{1+3/8} * 5 * 1
    cs.mul(2.0L, 6.125L).mul(3.0L, 0.75L).mul(4.0L, 1.375L);
    CHECK(mc.C_dprime_stated == doctest::Approx(cs.value() * 5.0).epsilon(1e-12));

    // the two C'' forms differ exactly by 3^{2-2s/p}
    double factor = std::pow(3.0, 2.0 - 2.0 * mc.s / mc.p);
    CHECK(mc.C_dprime_stated / mc.C_dprime_product ==
          doctest::Approx(factor).epsilon(1e-12));
}

TEST_CASE("morrey constants contract checks") {
    CHECK_THROWS_AS(morrey_constants(4.0, 1.0, 2.0, 1.5), std::invalid_argument); // p <= s
    CHECK_THROWS_AS(morrey_constants(0.9, 1.0, 2.0, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(morrey_constants(4.0, -1.0, 2.0, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(morrey_constants(4.0, 1.0, 0.5, 8.0), std::invalid_argument);
}

TEST_CASE("C(p) stays bounded over the p grid") {
    double sup = 0.0;
    for (double p = 4.0; p <= 256.0; p *= 2.0) {
        auto mc = morrey_constants(4.0, 1.0, 2.0, p, 3.0);
        CHECK(std::isfinite(mc.C_of_p));
        sup = std::max(sup, mc.C_of_p);
    }
    CHECK(std::isfinite(sup));
    // the p -> infinity limit of the stated form: 2^6 * 3 * C_D (1+C_D) C_P
    double limit = 64.0 * 3.0 * 4.0 * 5.0;
    auto big = morrey_constants(4.0, 1.0, 2.0, 256.0, 3.0);
    CHECK(big.C_of_p == doctest::Approx(limit).epsilon(0.1));
}

TEST_CASE("riesz potential closed forms") {
    auto two = MetricMeasureSpace::build(2, {{0, 1, 1.0, 0.0}}, {1.0, 1.0});
    std::vector<int> omega{0, 1};

    // h = 0
    CHECK(riesz_potential(two, {0.0, 0.0}, 2.0, 1.0, omega, 0) == doctest::Approx(0.0));

    // constant h: geometric sum c * 2^{i_max+1}; diam = 1, sigma = 1 -> i_max = 1
    double c = 0.7;
    CHECK(riesz_potential(two, {c, c}, 3.0, 1.0, omega, 0) ==
          doctest::Approx(c * std::exp2(2)));

    // h = (0,1), x = 0: balls of radius 2^i are {0} for i <= 0 (h(0)=0 there),
    // and both vertices for i = 1: term 2 * (1/2)^{1/p}
    for (double p : {1.0, 2.0, 8.0})
        CHECK(riesz_potential(two, {0.0, 1.0}, p, 1.0, omega, 0) ==
              doctest::Approx(2.0 * std::pow(0.5, 1.0 / p)));

    // singleton Omega has zero diameter: empty index range
    CHECK(riesz_potential(two, {1.0, 1.0}, 2.0, 1.0, {0}, 0) == doctest::Approx(0.0));

    CHECK_THROWS_AS(riesz_potential(two, {1.0, 1.0}, 2.0, 1.0, {}, 0),
                    std::invalid_argument);
}

TEST_CASE("riesz potential homogeneity and monotonicity") {
    auto sp = MetricMeasureSpace::circle(2 * PI, 12);
    std::vector<int> omega;
    for (int v = 0; v < 12; ++v) omega.push_back(v);
    FunctionOnSpace h(12);
    for (int v = 0; v < 12; ++v) h[v] = 0.1 + 0.2 * v;
    double base = riesz_potential(sp, h, 2.0, 1.0, omega, 3);
    for (double c : {0.0, 0.5, 2.0}) {
        FunctionOnSpace hc = h;
        for (double& v : hc) v *= c;
        CHECK(riesz_potential(sp, hc, 2.0, 1.0, omega, 3) ==
              doctest::Approx(c * base).epsilon(1e-12));
    }
    FunctionOnSpace hbig = h;
    for (double& v : hbig) v += 0.3;
    CHECK(riesz_potential(sp, hbig, 2.0, 1.0, omega, 3) >= base);
}

TEST_CASE("poincare estimate: two-point space by hand") {
    auto two = MetricMeasureSpace::build(2, {{0, 1, 1.0, 0.0}}, {1.0, 1.0});
    // f = (0,1): oscillation integral 1/2, lip = 1 everywhere, r = 1
    auto pd = poincare_estimate(two, 1.0, 1.0, {{0.0, 1.0}});
    CHECK(pd.C_P == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pd.method == "estimated-lower-bound");
}

TEST_CASE("poincare estimate stable under circle refinement") {
    auto a = poincare_estimate(MetricMeasureSpace::circle(2 * PI, 24), 1.0, 2.0);
    auto b = poincare_estimate(MetricMeasureSpace::circle(2 * PI, 48), 1.0, 2.0);
    CHECK(std::abs(a.C_P - b.C_P) / b.C_P < 0.2);
}

TEST_CASE("volume comparison passes with the exact doubling constant") {
    for (int n : {8, 32}) {
        auto sp = MetricMeasureSpace::circle(2 * PI, n);
        auto rep = volume_comparison_check(sp, sp.doubling_constant());
        CHECK(rep.pass);
        CHECK(rep.violations == 0);
        CHECK(rep.checks > 0);
    }
    auto two = MetricMeasureSpace::build(2, {{0, 1, 1.0, 0.0}}, {1.0, 1.0});
    CHECK(volume_comparison_check(two, two.doubling_constant()).pass);
    auto th = MetricMeasureSpace::theta_space(0.25);
    CHECK(volume_comparison_check(th, th.doubling_constant()).pass);
}

TEST_CASE("holder check: distance functions and eigenfunctions stay bounded") {
    auto sp = MetricMeasureSpace::circle(2 * PI, 32);
    double cd = sp.doubling_constant();
    auto pe = poincare_estimate(sp, 1.0, 2.0);

    FunctionOnSpace distf(32);
    for (int y = 0; y < 32; ++y) distf[y] = sp.dist(0, y);

    double prev_sup = 0.0;
    for (double p : {4.0, 8.0, 16.0, 32.0, 64.0}) {
        auto mc = morrey_constants(cd, pe.C_P, 2.0, p, sp.diameter());
        auto rep = holder_check(sp, distf, p, mc, 2.0);
        CHECK(std::isfinite(rep.max_ratio));
        prev_sup = std::max(prev_sup, rep.max_ratio);

        EnergyConfig e;
        e.p = p;
        std::vector<int> A;
        for (int v = 2; v <= 14; ++v) A.push_back(v);
        auto eig = dirichlet_eig1(sp, A, e);
        auto rep2 = holder_check(sp, eig.minimizer, p, mc, 2.0);
        CHECK(std::isfinite(rep2.max_ratio));
        // no blow-up as p grows
        CHECK(rep2.max_ratio < 50.0);
    }
    CHECK(std::isfinite(prev_sup));

    FunctionOnSpace constant(32, 1.0);
    auto mc = morrey_constants(cd, pe.C_P, 2.0, 8.0, sp.diameter());
    CHECK_THROWS_AS(holder_check(sp, constant, 8.0, mc, 2.0), std::invalid_argument);
}
