#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "packspec/space.hpp"

namespace packspec {

struct EnergyConfig {
    double p = 2.0;
    double tol = 1e-8;        // relative Rayleigh-decrease convergence
    int max_iter = 20000;
    int restarts = 8;
    uint64_t seed = 0;
    int threads = 1;          // parallel restarts; results are schedule-independent
    int log_domain = -1;      // -1: auto (on for p >= 32)
    FunctionOnSpace init;     // optional warm start, full-length

    bool use_log_domain() const { return log_domain < 0 ? p >= 32.0 : log_domain != 0; }
};

enum class SolveStatus { converged, max_iter, degenerate };

std::string to_string(SolveStatus s);

struct EigenResult {
    double lambda = 0.0;      // exp(log_lambda); +inf when out of double range
    double log_lambda = 0.0;
    double lambda_root = 0.0; // lambda^{1/p}, computed in log domain
    FunctionOnSpace minimizer;
    int iterations = 0;
    SolveStatus status = SolveStatus::converged;
    double restart_spread = 0.0; // relative spread of converged restart optima
};

// (sum_x m_x |f|^p)^{1/p}, computed with the sup factored out.
double p_norm(const MetricMeasureSpace& space, const FunctionOnSpace& f, double p);
// sum_e mu_e (|f(u)-f(v)|/len)^p, same overflow guard.
double p_energy(const MetricMeasureSpace& space, const FunctionOnSpace& f, double p);

double log_p_energy(const MetricMeasureSpace& space, const FunctionOnSpace& f, double p);
double log_p_norm_pow(const MetricMeasureSpace& space, const FunctionOnSpace& f, double p);

// p_energy / p_norm^p; requires f != 0.
double rayleigh(const MetricMeasureSpace& space, const FunctionOnSpace& f, double p);
double rayleigh_log(const MetricMeasureSpace& space, const FunctionOnSpace& f, double p);

// max{r - dist(x,.), 0}
FunctionOnSpace cone_function(const MetricMeasureSpace& space, int x, double r);

// First Dirichlet eigenvalue of the p-Laplacian on support A (functions vanish
// outside A). Decomposes A into connected components and takes the minimum.
// For p = 2 each component is solved by an exact dense eigensolve; otherwise by
// multistart projected descent on the Rayleigh quotient (cone profile at the
// component's deepest vertex, the p=2 eigenfunction, the warm start if given,
// and seeded random profiles). The result is always a certified upper bound.
EigenResult dirichlet_eig1(const MetricMeasureSpace& space, const std::vector<int>& A,
                           const EnergyConfig& cfg);

// Descent path regardless of p (the p = 2 exact route is bypassed); used to
// cross-validate the solver against the linear eigensolve.
EigenResult dirichlet_eig1_descent(const MetricMeasureSpace& space, const std::vector<int>& A,
                                   const EnergyConfig& cfg);

// Exact smallest eigenvalue of the p = 2 Dirichlet quadratic form on A.
double dirichlet_eig_p2_exact(const MetricMeasureSpace& space, const std::vector<int>& A,
                              FunctionOnSpace* minimizer = nullptr);

} // namespace packspec
