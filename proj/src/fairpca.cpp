#include "fairpca/fairpca.hpp"

#include <algorithm>
#include <cmath>

namespace fairpca {

namespace {

// Divide every user-facing value by s^2 so reports are in user coordinates
// even when the rows were width-normalized.
void unscale(FitResult& fr, double s) {
    const double inv = 1.0 / (s * s);
    if (inv == 1.0) return;
    fr.projection.objective *= inv;
    for (double& v : fr.projection.per_group_loss) v *= inv;
    fr.sdp.z_hat *= inv;
    fr.sdp.lower_bound *= inv;
    for (auto& pt : fr.sdp.gap_trace) {
        pt.upper *= inv;
        pt.lower *= inv;
    }
}

FairProjection identity_projection(int n, int d, int k,
                                   const std::vector<GroupStats>& stats) {
    FairProjection proj;
    proj.basis = Eigen::MatrixXd::Identity(n, n);
    proj.lambda_bar = Eigen::VectorXd::Ones(n);
    proj.lambda_star = Eigen::VectorXd::Ones(n);
    proj.d = d;
    proj.k = k;
    proj.per_group_loss.assign(stats.size(), 0.0);
    proj.objective = 0.0;
    return proj;
}

}  // namespace

FitResult fit(const GroupedDataset& ds, int d, const MwConfig& cfg) {
    if (ds.k() < 2) throw UsageError("fit: fairness needs at least 2 groups");
    if (d < 1) throw UsageError("fit: need d >= 1");
    const int n = ds.n();

    FitResult fr;
    fr.center_vector = ds.center_vector;
    fr.scale_record = ds.scale_record;

    if (d >= n) {
        // The identity reconstructs exactly; nothing to solve.
        const std::vector<GroupStats> stats = group_stats(ds);
        fr.projection = identity_projection(n, d, ds.k(), stats);
        fr.sdp.P_hat = Eigen::MatrixXd::Identity(n, n);
        fr.sdp.z_hat = 0.0;
        fr.sdp.lower_bound = 0.0;
        fr.sdp.iterations = 0;
        fr.sdp.converged = true;
        fr.sdp.eta_used = cfg.eta;
        fr.fair_report = audit(ds, n, fr.projection);
        fr.fair_report.d = d;
        auto [v, vrep] = fit_vanilla(ds, n);
        vrep.d = d;
        fr.vanilla_report = vrep;
        return fr;
    }

    const std::vector<GroupStats> stats = group_stats(ds);
    fr.sdp = mw_solve(stats, d, cfg);
    const SymmetricSpectrum sp = eig_sym(fr.sdp.P_hat);
    const LpResult lp = lp_extreme(sp, stats, d);
    const Eigen::VectorXd lambda_star = sqrt_transform(lp.lambda_bar);
    fr.projection = assemble(sp, lp.lambda_bar, lambda_star, stats, d);

    unscale(fr, ds.scale_record.width_factor);

    fr.fair_report = audit(ds, d, fr.projection);
    fr.fair_report.converged = fr.sdp.converged;
    fr.vanilla_report = fit_vanilla(ds, d).second;
    return fr;
}

std::pair<Eigen::MatrixXd, LossReport> fit_vanilla(const GroupedDataset& ds, int d) {
    if (d < 1 || d > ds.n()) throw UsageError("fit_vanilla: need 1 <= d <= n");
    const std::vector<GroupStats> stats = group_stats(ds);
    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(ds.n(), ds.n());
    for (const GroupStats& g : stats) pooled += g.gram();
    const Eigen::MatrixXd V = pca_top_d(pooled, d);
    return {V, audit(ds, d, V)};
}

std::vector<LossReport> sweep(const GroupedDataset& ds, const std::vector<int>& d_range,
                              const MwConfig& cfg) {
    if (d_range.empty()) throw UsageError("sweep: empty dimension range");
    for (int d : d_range)
        if (d < 1 || d > ds.n()) throw UsageError("sweep: each d must lie in [1, n]");

    std::vector<LossReport> out;
    std::vector<LossReport> prev_vanilla;
    for (int d : d_range) {
        LossReport vrep = fit_vanilla(ds, d).second;
        const FitResult fr = fit(ds, d, cfg);
        // Vanilla per-group error can only shrink as d grows.
        for (const LossReport& old : prev_vanilla) {
            if (old.d >= d) continue;
            for (size_t gi = 0; gi < vrep.per_group.size(); ++gi)
                if (vrep.per_group[gi].avg_error > old.per_group[gi].avg_error + 1e-9)
                    throw InternalError("sweep: vanilla error increased with d");
        }
        prev_vanilla.push_back(vrep);
        out.push_back(std::move(vrep));
        out.push_back(fr.fair_report);
    }
    return out;
}

}  // namespace fairpca
