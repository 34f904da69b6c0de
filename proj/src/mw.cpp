#include "fairpca/mw.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "fairpca/spectra.hpp"

namespace fairpca {

MwConfig MwConfig::theory(double eps, int k) {
    if (eps <= 0.0) throw UsageError("MwConfig::theory: eps must be positive");
    if (k < 2) throw UsageError("MwConfig::theory: need k >= 2");
    MwConfig cfg;
    cfg.eta = eps / 8.0;
    cfg.tol = eps;
    const double t = std::ceil(32.0 * std::log(static_cast<double>(k)) / (eps * eps));
    cfg.max_iters = t > static_cast<double>(std::numeric_limits<int>::max())
                        ? std::numeric_limits<int>::max()
                        : static_cast<int>(t);
    return cfg;
}

MwConfig::IterateMode iterate_mode_from_string(const std::string& s) {
    if (s == "average") return MwConfig::IterateMode::average;
    if (s == "last") return MwConfig::IterateMode::last;
    if (s == "best") return MwConfig::IterateMode::best;
    throw UsageError("unknown iterate mode '" + s + "' (expected average, last, or best)");
}

std::string to_string(MwConfig::IterateMode m) {
    switch (m) {
        case MwConfig::IterateMode::average: return "average";
        case MwConfig::IterateMode::last: return "last";
        case MwConfig::IterateMode::best: return "best";
    }
    throw InternalError("unhandled IterateMode");
}

namespace {

void check_stats(const std::vector<GroupStats>& stats, int d, const char* who) {
    if (stats.empty()) throw UsageError(std::string(who) + ": no groups");
    const int n = stats[0].n();
    for (const GroupStats& g : stats)
        if (g.n() != n) throw UsageError(std::string(who) + ": group dimensions disagree");
    if (d < 1 || d > n) throw UsageError(std::string(who) + ": need 1 <= d <= n");
}

// Max per-group average loss of a relaxed projection P.
double max_avg_loss_of(const Eigen::MatrixXd& P, const std::vector<GroupStats>& stats, int d) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const GroupStats& g : stats) {
        const double cap = g.gram().cwiseProduct(P).sum();
        worst = std::max(worst, (g.best_energy_at(d) - cap) / g.m());
    }
    return worst;
}

}  // namespace

OracleResult oracle(const Eigen::VectorXd& weights, const std::vector<GroupStats>& stats,
                    int d) {
    check_stats(stats, d, "oracle");
    const int k = static_cast<int>(stats.size());
    const int n = stats[0].n();
    if (weights.size() != k) throw UsageError("oracle: one weight per group required");
    if (weights.minCoeff() < -1e-15) throw UsageError("oracle: weights must be nonnegative");
    if (std::abs(weights.sum() - 1.0) > 1e-12) throw UsageError("oracle: weights must sum to 1");

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < k; ++i) W += (weights[i] / stats[i].m()) * stats[i].gram();

    OracleResult out;
    out.V = pca_top_d(W, d);
    out.z_vec.resize(k);
    for (int i = 0; i < k; ++i) {
        const double cap = (out.V.transpose() * stats[i].gram() * out.V).trace();
        out.z_vec[i] = (stats[i].best_energy_at(d) - cap) / stats[i].m();
    }
    return out;
}

SdpSolution mw_solve(const std::vector<GroupStats>& stats, int d, const MwConfig& cfg) {
    check_stats(stats, d, "mw_solve");
    if (stats.size() < 2) throw UsageError("mw_solve: fairness needs at least 2 groups");
    if (cfg.eta <= 0.0) throw UsageError("mw_solve: eta must be positive");
    if (cfg.max_iters < 1) throw UsageError("mw_solve: max_iters must be positive");

    const int k = static_cast<int>(stats.size());
    const int n = stats[0].n();

    Eigen::VectorXd logp = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd p_sum = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd p_last = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd p_best = Eigen::MatrixXd::Zero(n, n);
    double lower = -std::numeric_limits<double>::infinity();
    double best_upper = std::numeric_limits<double>::infinity();

    SdpSolution sol;
    sol.eta_used = cfg.eta;

    int t = 0;
    double u_avg = 0.0, u_last = 0.0;
    while (t < cfg.max_iters) {
        ++t;
        Eigen::VectorXd p = (logp.array() - logp.maxCoeff()).exp();
        p /= p.sum();

        const OracleResult res = oracle(p, stats, d);
        lower = std::max(lower, p.dot(res.z_vec));

        p_last = res.V * res.V.transpose();
        p_sum += p_last;
        const Eigen::MatrixXd p_avg = p_sum / t;

        u_avg = max_avg_loss_of(p_avg, stats, d);
        u_last = max_avg_loss_of(p_last, stats, d);
        if (u_avg < best_upper) {
            best_upper = u_avg;
            p_best = p_avg;
        }
        if (u_last < best_upper) {
            best_upper = u_last;
            p_best = p_last;
        }

        double upper = 0.0;
        switch (cfg.iterate_mode) {
            case MwConfig::IterateMode::average: upper = u_avg; break;
            case MwConfig::IterateMode::last: upper = u_last; break;
            case MwConfig::IterateMode::best: upper = best_upper; break;
        }
        sol.gap_trace.push_back({t, upper, lower});

        if (upper - lower <= cfg.tol) {
            sol.converged = true;
            break;
        }
        logp += cfg.eta * res.z_vec;
    }

    sol.iterations = t;
    switch (cfg.iterate_mode) {
        case MwConfig::IterateMode::average:
            sol.P_hat = p_sum / t;
            sol.z_hat = u_avg;
            break;
        case MwConfig::IterateMode::last:
            sol.P_hat = p_last;
            sol.z_hat = u_last;
            break;
        case MwConfig::IterateMode::best:
            sol.P_hat = p_best;
            sol.z_hat = best_upper;
            break;
    }
    sol.P_hat = 0.5 * (sol.P_hat + sol.P_hat.transpose());
    sol.lower_bound = lower;
    return sol;
}

const std::vector<double>& default_eta_ladder() {
    static const std::vector<double> ladder = [] {
        std::vector<double> v;
        for (int e = 0; e <= 13; ++e) v.push_back(std::ldexp(1.0, e));  // 1, 2, ..., 8192
        v.push_back(0.5);
        v.push_back(0.25);
        v.push_back(0.125);
        return v;
    }();
    return ladder;
}

SdpSolution mw_solve_auto(const std::vector<GroupStats>& stats, int d, MwConfig cfg,
                          const std::vector<double>& etas) {
    if (etas.empty()) throw UsageError("mw_solve_auto: empty eta ladder");
    SdpSolution best;
    bool have = false;
    for (double eta : etas) {
        cfg.eta = eta;
        SdpSolution sol = mw_solve(stats, d, cfg);
        if (sol.converged) return sol;
        if (!have || sol.gap() < best.gap()) {
            best = std::move(sol);
            have = true;
        }
    }
    return best;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_gap_trace_csv(std::ostream& out, const SdpSolution& sol) {
    out << "iter,upper,lower,gap\n";
    for (const auto& pt : sol.gap_trace)
        out << pt.iter << ',' << format_double(pt.upper) << ',' << format_double(pt.lower)
            << ',' << format_double(pt.upper - pt.lower) << '\n';
}

}  // namespace fairpca
