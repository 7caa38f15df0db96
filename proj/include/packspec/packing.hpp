#pragma once
#include <optional>
#include <string>
#include <vector>

#include "packspec/space.hpp"

namespace packspec {

enum class PackMode { exact, greedy, auto_mode };

struct PackingResult {
    std::vector<int> centers;   // lexicographically smallest optimal set in exact mode
    double radius = 0.0;        // half of the min pairwise distance of centers
    int k_plus_1 = 0;
    bool exact = false;
    double lower_bound = 0.0;   // certified bracket in heuristic mode
    double upper_bound = 0.0;
};

// pack_{k+1} = (1/2) max over (k+1)-subsets of the min pairwise distance.
// Exact mode binary-searches the sorted distinct distances; feasibility at a
// threshold is a clique query on the far graph, pruned by greedy coloring.
// Greedy mode is farthest-point insertion (>= exact/2) with a degree-relaxation
// upper bound.
PackingResult pack_radius(const MetricMeasureSpace& space, int k_plus_1,
                          PackMode mode = PackMode::auto_mode);

// max over x in A of dist(x, complement of A); A proper nonempty
double inradius(const MetricMeasureSpace& space, const std::vector<int>& A);

struct InpackResult {
    std::vector<int> centers;
    double radius = 0.0;
};

// k-th inscribed packing radius of Omega: max over k-subsets of Omega of
// min(min pairwise dist / 2, min dist to complement). k = 1 gives the inradius.
InpackResult inpack(const MetricMeasureSpace& space, const std::vector<int>& omega, int k);

struct CountingResult {
    int count = 0;          // #{k >= 1 : pack_{k+1} > r}
    bool truncated = false; // pack_{k_max+1} still exceeded r
    std::vector<double> pack_sequence; // pack_{k+1} for k = 1.. as computed
};

CountingResult counting_function(const MetricMeasureSpace& space, double r, int k_max);

struct PackingLawRow {
    int space_index;
    int k;          // number of balls
    double pack_k;
    double k_pack_n_over_vol;
    bool in_valid_range; // pack_k still above the mesh floor
};

struct PackingLawReport {
    std::vector<PackingLawRow> rows;
    double extrapolated_constant = 0.0; // tail mean over the valid range
    double target = 0.0;                // 1/2 for dim 1, 0 = not asserted
};

// k * pack_k^n / vol diagnostics for a refinement family discretizing one
// continuum space of dimension dim; vols[i] is the continuum volume.
PackingLawReport packing_law_report(const std::vector<const MetricMeasureSpace*>& spaces,
                                    const std::vector<double>& vols, int dim,
                                    const std::vector<int>& k_list);

} // namespace packspec
