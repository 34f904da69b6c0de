#pragma once

#include <utility>
#include <vector>

#include "fairpca/ingest.hpp"
#include "fairpca/losses.hpp"
#include "fairpca/mw.hpp"
#include "fairpca/rounding.hpp"

namespace fairpca {

// End-to-end result of one fair fit. All user-facing numbers (projection
// objective and per-group losses, sdp bounds and trace, reports) are in user
// coordinates: when the dataset was width-normalized by s, the solve-space
// values have been divided by s^2.
struct FitResult {
    FairProjection projection;
    SdpSolution sdp;
    LossReport fair_report;
    LossReport vanilla_report;
    Eigen::VectorXd center_vector;  // preprocessing echo for round-tripping
    ScaleRecord scale_record;
};

// Full pipeline: group stats -> mw_solve -> eig_sym(P_hat) -> lp_extreme ->
// sqrt_transform -> assemble, plus fair/vanilla audit reports. Deterministic
// given (dataset bits, cfg). Requires k >= 2 and d >= 1; d >= n returns the
// identity projection with zero losses without solving. MW non-convergence
// is flagged on the result (sdp.converged, fair_report.converged), not
// thrown.
FitResult fit(const GroupedDataset& ds, int d, const MwConfig& cfg = {});

// Vanilla baseline: rank-d PCA of the pooled Gram, with a per-group report.
std::pair<Eigen::MatrixXd, LossReport> fit_vanilla(const GroupedDataset& ds, int d);

// Fair and vanilla reports for each d in d_range (vanilla first for each d).
// Per-d convergence failures are flagged on the fair report and the sweep
// continues. Verifies that vanilla per-group errors are nonincreasing in d.
std::vector<LossReport> sweep(const GroupedDataset& ds, const std::vector<int>& d_range,
                              const MwConfig& cfg = {});

}  // namespace fairpca
