#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

#include "fairpca/losses.hpp"

namespace fairpca {

struct MwConfig {
    enum class IterateMode { average, last, best };

    double eta = 1.0;       // learning rate of the exponential update
    int max_iters = 200;    // oracle-call cap
    double tol = 1e-5;      // duality-gap target (additive)
    IterateMode iterate_mode = IterateMode::best;

    // Conservative theory schedule: eta = eps/8 (the oracle is (1,1)-bounded
    // after width normalization) and T = ceil(32 ln(k) / eps^2). Practical
    // only for coarse eps; the default practical schedule is a tuned eta.
    static MwConfig theory(double eps, int k);
};

MwConfig::IterateMode iterate_mode_from_string(const std::string& s);
std::string to_string(MwConfig::IterateMode m);

struct SdpSolution {
    Eigen::MatrixXd P_hat;      // symmetric, 0 <= eig <= 1, trace <= d (up to 1e-8)
    double z_hat = 0.0;         // max per-group average loss of P_hat
    double lower_bound = 0.0;   // best dual certificate max_t p_t . z_t
    int iterations = 0;         // oracle calls made
    bool converged = false;     // gap <= tol before the cap
    double eta_used = 0.0;

    struct TracePoint {
        int iter;
        double upper;
        double lower;
    };
    std::vector<TracePoint> gap_trace;

    double gap() const { return z_hat - lower_bound; }
};

struct OracleResult {
    Eigen::MatrixXd V;       // n x d, top-d eigenvectors of the weighted Gram
    Eigen::VectorXd z_vec;   // per-group average losses of V V^T
};

// One weighted standard PCA: V = pca_top_d(sum_i (p_i/m_i) gram_i, d) and
// z_i = best_energy_at_i(d)/m_i - <gram_i/m_i, V V^T>. The weighted value
// p . z is a lower bound on the SDP optimum. Weights must be nonnegative and
// sum to 1 within 1e-12.
OracleResult oracle(const Eigen::VectorXd& weights, const std::vector<GroupStats>& stats,
                    int d);

// Multiplicative-weights solve of the min-max SDP relaxation with a fixed
// eta, log-space exponential weight updates, and duality-gap stopping.
// iterate_mode picks the returned P_hat: the running average, the last
// iterate, or the best candidate among both tracked across iterations.
// Non-convergence is not an exception: the best solution found is returned
// with converged = false. Requires k >= 2 groups and 1 <= d <= n.
SdpSolution mw_solve(const std::vector<GroupStats>& stats, int d, const MwConfig& cfg = {});

// Ladder of learning rates tried by mw_solve_auto, in order.
const std::vector<double>& default_eta_ladder();

// Per-instance tuning of MW's single parameter: run mw_solve afresh (never
// annealed within a run) for each eta in the ladder and return the first
// converged solution, or the smallest-gap one if none converges. eta_used
// records the winning rate.
SdpSolution mw_solve_auto(const std::vector<GroupStats>& stats, int d, MwConfig cfg = {},
                          const std::vector<double>& etas = default_eta_ladder());

// CSV: iter,upper,lower,gap.
void write_gap_trace_csv(std::ostream& out, const SdpSolution& sol);

}  // namespace fairpca
