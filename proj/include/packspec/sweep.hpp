#pragma once
#include <optional>
#include <string>
#include <vector>

#include "packspec/fakespec.hpp"
#include "packspec/space.hpp"

namespace packspec {

struct SweepRow {
    double p = 0.0;
    double lambda_bar_root = 0.0;
    double lambda_under_root = 0.0;
    double p_times_root = 0.0;     // p * lambda_bar^{1/p}
    double bound_root = 0.0;       // packing_upper_bound^{1/p}
    std::string status = "ok";     // solver failures are recorded, not dropped
};

struct SweepReport {
    std::string space_id;
    int k = 0;
    bool dirichlet = false;
    std::vector<SweepRow> rows;    // sorted by p
    double target = 0.0;           // 1/pack_{k+1}, or 1/inpack_k for Dirichlet sweeps
    double extrapolated_limit = 0.0;
    double extrapolation_residual = 0.0;
    bool extrapolation_refused = false;
    double rel_err_at_pmax = 0.0;
    double rel_err_extrapolated = 0.0;
};

// Runs the fake-spectrum searches over an increasing p grid. Each p is seeded
// fresh from packing and warm-started from the previous family; the better end
// family wins.
SweepReport p_sweep(const MetricMeasureSpace& space, int k, const std::vector<double>& p_list,
                    Strategy strategy, const FakespecConfig& cfg);

SweepReport dirichlet_sweep(const MetricMeasureSpace& space, const std::vector<int>& omega,
                            int k, const std::vector<double>& p_list, Strategy strategy,
                            const FakespecConfig& cfg);

struct ConvergenceEstimate {
    double c0 = 0.0;       // extrapolated limit of lambda^{1/p}
    double c1 = 0.0;
    double max_residual = 0.0;
    bool refused = false;  // fewer than 3 rows: c0 is the last row's value
};

// Least-squares fit lambda^{1/p} ~ c0 + c1/p over the top half of the grid.
ConvergenceEstimate convergence_estimate(const std::vector<SweepRow>& rows);

struct AuditRow {
    std::string law;
    std::string instance;
    double lhs = 0.0;
    double rhs = 0.0;
    double tol = 0.0;
    bool pass = false;
};

// Test-only seam: scales the left-hand side of one law to verify that the
// audit actually reports violations.
struct AuditTamper {
    std::string law;
    double lhs_factor = 1.0;
};

// Runs every invariant suite across the modules on one space: order laws,
// monotonicity laws, packing laws, union/domain bounds, span identities and
// the Lipschitz realization, one row per law instance.
std::vector<AuditRow> audit(const MetricMeasureSpace& space, int k_max,
                            const std::vector<double>& p_list, Strategy strategy,
                            const FakespecConfig& cfg, uint64_t seed = 0,
                            const AuditTamper* tamper = nullptr);

struct RefinementRow {
    int n = 0;
    double value = 0.0;
    double reference = 0.0; // 0 when no closed form applies
    double error = 0.0;
};

struct RefinementStudy {
    std::string quantity;
    std::vector<RefinementRow> rows;
    double empirical_order = 0.0; // slope of log(error) vs log(n), if errors known
};

// quantity: "dirichlet_lambda" (interval, p given), "pack" (circle, k+1 given),
// "diameter" (theta), "lambda_bar" (circle, k given)
RefinementStudy refinement_study(const std::string& generator, const std::string& quantity,
                                 const std::vector<int>& n_list, int k, double p,
                                 const FakespecConfig& cfg);

} // namespace packspec
