#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace packspec {

// A finite geodesic metric measure space: connected weighted graph with the
// shortest-path metric, a probability measure on vertices and a nonnegative
// measure on edges. Immutable after build; safe to share across threads.
class MetricMeasureSpace {
public:
    struct Edge {
        int u, v;
        double length;   // > 0
        double measure;  // >= 0
    };

    // Validates and finishes a space: normalizes the vertex measure to sum 1,
    // fills missing edge measures with length/total_length, computes all-pairs
    // shortest-path distances. Throws std::invalid_argument on a disconnected
    // graph, nonpositive lengths or measures, or n < 2.
    static MetricMeasureSpace build(int n, std::vector<Edge> edges,
                                    std::vector<double> vertex_measure,
                                    nlohmann::ordered_json meta = {});

    // Generators. Vertex measure is the 1D cell (half of incident lengths) and
    // edge measure is the edge length, both normalized by the total length, so
    // that the discrete p-energy quotient is the trapezoid discretization of
    // the continuum Rayleigh quotient.
    static MetricMeasureSpace circle(double L, int n);
    static MetricMeasureSpace interval(double L, int n);
    static MetricMeasureSpace torus_grid(double L1, double L2, int n1, int n2);
    // Union of segment [-2,-1]x{0}, unit circle, segment [1,2]x{0} glued at
    // (-1,0) and (1,0); intrinsic metric, measure ~ 1D Hausdorff. Edge lengths
    // are arclengths, so the tip-to-tip diameter pi+2 is exact.
    static MetricMeasureSpace theta_space(double h);
    static MetricMeasureSpace random_geometric(int n, double radius, uint64_t seed);

    int size() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    double vertex_measure(int x) const { return vm_[x]; }
    const std::vector<double>& vertex_measures() const { return vm_; }
    double dist(int x, int y) const { return dist_[static_cast<size_t>(x) * n_ + y]; }
    // (edge index, neighbor) pairs for a vertex
    const std::vector<std::pair<int, int>>& incident(int v) const { return adj_[v]; }

    double diameter() const;
    double total_edge_length() const;

    // Open ball {y : dist(x,y) < r}.
    std::vector<int> ball(int x, double r) const;
    double ball_measure(int x, double r) const;         // strict
    double ball_measure_closed(int x, double r) const;  // dist <= r

    // Exact sup over centers and radii of m(U_2r)/m(U_r). The ratio is
    // piecewise constant in r with breakpoints at distances and half-distances,
    // so the sup is attained just above a breakpoint.
    double doubling_constant() const;

    // max over neighbors y of |f(x)-f(y)| / edge length
    double lip_local(const std::vector<double>& f, int x) const;
    // max over x != y of |f(x)-f(y)| / dist(x,y)
    double lip_global(const std::vector<double>& f) const;
    // max over edges of |f(u)-f(v)| / length; equals lip_global on a
    // shortest-path metric (discrete Sobolev-to-Lipschitz realization)
    double max_edge_slope(const std::vector<double>& f) const;

    // sorted distinct positive distance values
    std::vector<double> distance_values() const;
    double min_positive_distance_from(int x) const;

    const nlohmann::ordered_json& meta() const { return meta_; }

    nlohmann::ordered_json to_json() const;
    static MetricMeasureSpace from_json(const nlohmann::ordered_json& j);
    static MetricMeasureSpace load(const std::string& path);
    void save(const std::string& path) const;

private:
    MetricMeasureSpace() = default;
    void compute_distances();

    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<double> vm_;
    std::vector<double> dist_;
    std::vector<std::vector<std::pair<int, int>>> adj_;
    nlohmann::ordered_json meta_;
};

// Values of a function on the vertices.
using FunctionOnSpace = std::vector<double>;

// Throws unless f has one finite entry per vertex.
void validate_function(const MetricMeasureSpace& space, const FunctionOnSpace& f);

} // namespace packspec
