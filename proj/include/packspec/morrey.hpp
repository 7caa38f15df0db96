#pragma once
#include <string>
#include <vector>

#include "packspec/space.hpp"

namespace packspec {

struct PoincareData {
    double C_P = 0.0;
    double p_0 = 1.0;
    double sigma = 1.0;
    std::string method = "estimated-lower-bound";
};

struct MorreyConstants {
    double s = 0.0;        // log2(C_D)
    double C = 0.0;        // (1+C_D) C_D C_P / sigma
    double C_prime = 0.0;  // 2^{4+1/p} 3^{-1+2s/p} C_D^{1/p} sigma^{1+s/p}
    double C_dprime_stated = 0.0;  // 2^{6+1/p} 3^{1-s/p} C_D^{1+3/p} (1+C_D) C_P
    double C_dprime_product = 0.0; // 4 3^{-s/p} C C' C_D^{2/p} sigma^{-s/p}
    double C_of_p = 0.0;   // C_dprime_stated * diam^{s/p}
    double p = 0.0;
    double diam = 1.0;
    std::string note; // records the stated/product discrepancy factor 3^{2-2s/p}
};

// Explicit Morrey constants. Uses the stated (conservative) form of C'' in
// C_of_p; both forms are recorded, they differ exactly by 3^{2-2s/p}.
// Requires C_D > 1, C_P > 0, sigma >= 1, p > s = log2(C_D).
MorreyConstants morrey_constants(double C_D, double C_P, double sigma, double p,
                                 double diam = 1.0);

// Generalized Riesz potential: sum over integers i with 2^i <= 2 sigma diam(Omega)
// of 2^i (avg over U_{2^i}(x) of |h|^p)^{1/p}. Below the minimum positive
// distance from x every ball is {x}, so that tail is the closed-form geometric
// sum 2^{i*+1} |h(x)|.
double riesz_potential(const MetricMeasureSpace& space, const FunctionOnSpace& h, double p,
                       double sigma, const std::vector<int>& omega, int x);

// Lower bound for the Poincare constant from a structured test family
// (distance functions, cones, p=2 minimizers, smoothed random functions).
PoincareData poincare_estimate(const MetricMeasureSpace& space, double p0, double sigma,
                               const std::vector<FunctionOnSpace>& extra_family = {},
                               uint64_t seed = 0);

struct HolderReport {
    double max_ratio = 0.0; // sup |f(x)-f(y)| / (||Df||_p dist^{1-s/p})
    double bound = 0.0;     // C_of_p inflated by the safety factor
    double c_of_p = 0.0;
    double safety = 1.0;
    bool pass = false;
};

HolderReport holder_check(const MetricMeasureSpace& space, const FunctionOnSpace& f, double p,
                          const MorreyConstants& constants, double safety = 1.0);

struct VolumeComparisonReport {
    long checks = 0;
    long violations = 0;
    double worst_margin = 0.0; // max of lhs/rhs over all checks
    bool pass = false;
};

// Exhaustively verifies m(U_r(x)) <= 2 C_D (r/r')^s m(U_{r'}(x')) for
// x' in U_r(x), r' < r, and the same-center version without the factor 2,
// over the finite critical-radius grid.
VolumeComparisonReport volume_comparison_check(const MetricMeasureSpace& space, double C_D);

} // namespace packspec
