#include "fairpca/losses.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "fairpca/rounding.hpp"

namespace fairpca {

namespace {

void check_orthonormal(const Eigen::MatrixXd& V, const char* who) {
    if (V.cols() == 0) return;
    const int d = static_cast<int>(V.cols());
    const Eigen::MatrixXd G = V.transpose() * V;
    if ((G - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8)
        throw UsageError(std::string(who) + ": columns are not orthonormal within 1e-8");
}

}  // namespace

GroupStats::GroupStats(std::string label, const Eigen::MatrixXd& rows) {
    label_ = std::move(label);
    m_ = static_cast<int>(rows.rows());
    gram_ = fairpca::gram(rows);
    finish();
}

GroupStats GroupStats::from_gram(std::string label, Eigen::MatrixXd gram_matrix, int m) {
    if (m < 1) throw UsageError("GroupStats: row count must be positive");
    GroupStats s;
    s.label_ = std::move(label);
    s.m_ = m;
    s.gram_ = 0.5 * (gram_matrix + gram_matrix.transpose());
    s.finish();
    return s;
}

void GroupStats::finish() {
    total_ = gram_.trace();
    const SymmetricSpectrum sp = eig_sym(gram_);
    prefix_.assign(static_cast<size_t>(n()) + 1, 0.0);
    for (int d = 1; d <= n(); ++d) prefix_[d] = prefix_[d - 1] + sp.eigenvalues[d - 1];
}

double GroupStats::best_energy_at(int d) const {
    if (d < 1 || d > n()) throw UsageError("best_energy_at: need 1 <= d <= n");
    return prefix_[d];
}

std::vector<GroupStats> group_stats(const GroupedDataset& ds) {
    std::vector<GroupStats> out;
    out.reserve(ds.k());
    for (int gi = 0; gi < ds.k(); ++gi) {
        if (ds.group_size(gi) == 0)
            throw DataError("group '" + ds.group_labels[gi] + "' has no rows");
        out.emplace_back(ds.group_labels[gi], ds.group_rows(gi));
    }
    return out;
}

double LossReport::max_avg_loss() const {
    double v = 0.0;
    for (const auto& e : per_group) v = std::max(v, e.avg_loss);
    return v;
}

double reconstruction_error(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Z) {
    if (Y.rows() != Z.rows() || Y.cols() != Z.cols())
        throw UsageError("reconstruction_error: shapes do not match");
    return (Y - Z).squaredNorm();
}

double loss_projection(const GroupStats& stats, const Eigen::MatrixXd& V, int d) {
    if (V.rows() != stats.n() || static_cast<int>(V.cols()) != d)
        throw UsageError("loss_projection: V must be n x d");
    check_orthonormal(V, "loss_projection");
    const double captured = (V.transpose() * stats.gram() * V).trace();
    return stats.best_energy_at(d) - captured;
}

double loss_affine(const GroupStats& stats, const Eigen::MatrixXd& basis,
                   const Eigen::VectorXd& coeffs, int d) {
    if (basis.rows() != stats.n() || basis.cols() != coeffs.size())
        throw UsageError("loss_affine: basis must be n x r with one coefficient per column");
    check_orthonormal(basis, "loss_affine");
    double captured = 0.0;
    for (int j = 0; j < coeffs.size(); ++j) {
        double c = coeffs[j];
        if (c <= 0.0 || c > 1.0 + 1e-12)
            throw UsageError("loss_affine: coefficients must lie in (0, 1]");
        c = std::min(c, 1.0);
        const Eigen::VectorXd u = basis.col(j);
        captured += (2.0 * c - c * c) * u.dot(stats.gram() * u);
    }
    return stats.best_energy_at(d) - captured;
}

namespace {

LossReport audit_common(const GroupedDataset& ds, int d, const std::string& method,
                        const std::function<double(const GroupStats&)>& captured_energy) {
    if (d < 1 || d > ds.n()) throw UsageError("audit: need 1 <= d <= n");
    const std::vector<GroupStats> stats = group_stats(ds);
    const double s = ds.scale_record.width_factor;
    const double unscale = 1.0 / (s * s);

    LossReport rep;
    rep.method = method;
    rep.d = d;
    for (const GroupStats& g : stats) {
        const double cap = captured_energy(g);
        const double err = (g.total_energy() - cap) / g.m();
        const double loss = (g.best_energy_at(d) - cap) / g.m();
        rep.per_group.push_back({g.label(), err * unscale, loss * unscale});
    }
    return rep;
}

}  // namespace

LossReport audit(const GroupedDataset& ds, int d, const Eigen::MatrixXd& V) {
    if (V.rows() != ds.n() || static_cast<int>(V.cols()) != d)
        throw UsageError("audit: projection dimension incompatible with dataset");
    check_orthonormal(V, "audit");
    return audit_common(ds, d, "vanilla", [&](const GroupStats& g) {
        return (V.transpose() * g.gram() * V).trace();
    });
}

LossReport audit(const GroupedDataset& ds, int d, const FairProjection& proj) {
    if (proj.basis.rows() != ds.n())
        throw UsageError("audit: projection dimension incompatible with dataset");
    return audit_common(ds, d, "fair", [&](const GroupStats& g) {
        double cap = 0.0;
        for (int j = 0; j < proj.r(); ++j) {
            const double c = proj.lambda_star[j];
            const Eigen::VectorXd u = proj.basis.col(j);
            cap += (2.0 * c - c * c) * u.dot(g.gram() * u);
        }
        return cap;
    });
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_report_csv(std::ostream& out, const std::vector<LossReport>& reports) {
    out << "method,d,group,avg_error,avg_loss\n";
    for (const LossReport& rep : reports)
        for (const auto& e : rep.per_group)
            out << rep.method << ',' << rep.d << ',' << e.group << ','
                << format_double(e.avg_error) << ',' << format_double(e.avg_loss) << '\n';
}

std::string report_csv(const std::vector<LossReport>& reports) {
    std::ostringstream ss;
    write_report_csv(ss, reports);
    return ss.str();
}

}  // namespace fairpca
