#pragma once
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "packspec/mask.hpp"
#include "packspec/penergy.hpp"
#include "packspec/space.hpp"

namespace packspec {

// Per-support solve cache, shareable across searches at the same p.
struct FakespecMemoEntry {
    double log_lambda = 0.0;
    FunctionOnSpace minimizer;
};

struct FakespecMemo {
    double p = 0.0;
    std::unordered_map<VertexMask, FakespecMemoEntry, VertexMaskHash> search, final_q;
};

enum class Strategy { exhaustive, local, anneal };

Strategy strategy_from_string(const std::string& s);
std::string to_string(Strategy s);

// k+1 (or k, Dirichlet variant) supports, pairwise disjoint and pairwise
// non-adjacent: no edge may join two supports, the discrete stand-in for
// disjoint open sets. Without it the disjoint-span energy decomposition fails.
struct DisjointFamily {
    std::vector<std::vector<int>> supports;
    std::optional<std::vector<int>> ambient;
};

void validate_family(const MetricMeasureSpace& space, const DisjointFamily& family);

enum class Certificate { exact, upper_bound };

struct FakeSpecResult {
    DisjointFamily family;
    std::vector<double> per_set_lambda;
    std::vector<double> per_set_log_lambda;
    double lambda_bar = 0.0;   // max over the family
    double log_lambda_bar = 0.0;
    double lambda_bar_root = 0.0;
    double lambda_under = 0.0; // mean over the family
    double log_lambda_under = 0.0;
    double lambda_under_root = 0.0;
    Strategy strategy = Strategy::local;
    Certificate certificate = Certificate::upper_bound;
    double packing_bound = 0.0;
    double packing_bound_root = 0.0;
};

struct FakespecConfig {
    EnergyConfig energy;
    int search_restarts = 2;  // reduced restarts while searching
    int final_restarts = 8;   // full restarts on the final family
    uint64_t seed = 0;
    double seed_ball_fraction = 0.9;
    int max_passes = 400; // one accepted move per pass in first-improvement order
    int exhaustive_max_n = 14; // raise explicitly for larger instances
    int anneal_iters_per_vertex = 30;
    double anneal_t0 = 0.25;
    double anneal_t1 = 1e-3;
    // extra search seed, e.g. the previous family of a p-sweep
    std::vector<std::vector<int>> warm_supports;
    // optional shared solve cache; honored when memo->p matches the run's p
    std::shared_ptr<FakespecMemo> memo;
};

// min over families of k+1 disjoint non-adjacent supports of the max of their
// first Dirichlet eigenvalues. Exhaustive strategy enumerates separator sets:
// for a fixed set of unused vertices the optimum is the (k+1)-th smallest
// Dirichlet value among connected components, so the scan over 2^n separator
// sets is exact. Local strategy seeds supports from packing balls and
// hill-climbs vertex moves; anneal adds a Metropolis schedule.
FakeSpecResult lambda_bar(const MetricMeasureSpace& space, int k, double p, Strategy strategy,
                          const FakespecConfig& cfg);
// Same search, objective mean instead of max.
FakeSpecResult lambda_under(const MetricMeasureSpace& space, int k, double p, Strategy strategy,
                            const FakespecConfig& cfg);

// Dirichlet variants: k supports constrained inside a proper subset Omega.
FakeSpecResult lambda_bar_dirichlet(const MetricMeasureSpace& space,
                                    const std::vector<int>& omega, int k, double p,
                                    Strategy strategy, const FakespecConfig& cfg);
FakeSpecResult lambda_under_dirichlet(const MetricMeasureSpace& space,
                                      const std::vector<int>& omega, int k, double p,
                                      Strategy strategy, const FakespecConfig& cfg);

struct PackingBound {
    double value = 0.0;
    double log_value = 0.0;
    double root = 0.0;
    DisjointFamily family;
    std::vector<double> per_set;
};

// Cone functions on the (k+1)-packer balls, supports trimmed to pairwise
// non-adjacency; max of their Rayleigh quotients certifies an upper bound on
// lambda_bar.
PackingBound packing_upper_bound(const MetricMeasureSpace& space, int k, double p);

struct SpanReport {
    double norm_lhs = 0.0, norm_rhs = 0.0;
    double energy_lhs = 0.0, energy_rhs = 0.0;
    double rel_err_norm = 0.0, rel_err_energy = 0.0;
    double quotient = 0.0, max_lambda = 0.0;
    bool quotient_bounded = false;
};

// For u_i the family's minimizers with ||u_i||_p = 1 and g = sum t_i u_i,
// checks ||g||_p^p = sum |t_i|^p and E_p(g) = sum |t_i|^p E_p(u_i); both
// decompose exactly over disjoint non-adjacent supports.
SpanReport span_identity_check(const MetricMeasureSpace& space, const DisjointFamily& family,
                               const std::vector<double>& t, double p,
                               const FakespecConfig& cfg);

} // namespace packspec
