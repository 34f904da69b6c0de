#include "fairpca/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fairpca/refcheck.hpp"

namespace fairpca {

namespace {

constexpr double kFracTol = 1e-9;   // lambda within this of {0,1} counts integral
constexpr double kSnapTol = 1e-12;  // snap to exact bounds after each move

std::vector<int> fractional_set(const Eigen::VectorXd& lambda) {
    std::vector<int> f;
    for (int j = 0; j < lambda.size(); ++j)
        if (lambda[j] > kFracTol && lambda[j] < 1.0 - kFracTol) f.push_back(j);
    return f;
}

void snap(Eigen::VectorXd& lambda) {
    for (int j = 0; j < lambda.size(); ++j) {
        if (lambda[j] < 0.0 || std::abs(lambda[j]) < kSnapTol) lambda[j] = 0.0;
        if (lambda[j] > 1.0 || std::abs(lambda[j] - 1.0) < kSnapTol) lambda[j] = 1.0;
    }
}

}  // namespace

Eigen::MatrixXd FairProjection::P_star() const {
    return basis * lambda_star.asDiagonal() * basis.transpose();
}

LpResult lp_extreme(const SymmetricSpectrum& spectrum, const std::vector<GroupStats>& stats,
                    int d) {
    const int n = static_cast<int>(spectrum.eigenvalues.size());
    const int k = static_cast<int>(stats.size());
    if (k < 1) throw UsageError("lp_extreme: no groups");
    if (d < 1 || d > n) throw UsageError("lp_extreme: need 1 <= d <= n");
    for (const GroupStats& g : stats)
        if (g.n() != n) throw UsageError("lp_extreme: stats dimension mismatch");

    Eigen::VectorXd lambda = spectrum.eigenvalues;
    if (lambda.minCoeff() < -1e-6 || lambda.maxCoeff() > 1.0 + 1e-6 ||
        lambda.sum() > d + 1e-6)
        throw UsageError("lp_extreme: spectrum is not SDP-feasible");
    lambda = lambda.cwiseMax(0.0).cwiseMin(1.0);
    if (lambda.sum() > d) lambda *= d / lambda.sum();
    snap(lambda);

    // c(i,j) = <gram_i, u_j u_j^T> / m_i; alpha_i = best_energy_at(d) / m_i.
    const Eigen::MatrixXd& U = spectrum.eigenvectors;
    Eigen::MatrixXd c(k, n);
    Eigen::VectorXd alpha(k);
    for (int i = 0; i < k; ++i) {
        const Eigen::MatrixXd GU = stats[i].gram() * U;
        c.row(i) = (U.array() * GU.array()).colwise().sum() / stats[i].m();
        alpha[i] = stats[i].best_energy_at(d) / stats[i].m();
    }

    const int max_steps = 50 * n + 100;
    bool stalled = false;
    for (int step = 0; step < max_steps; ++step) {
        const std::vector<int> F = fractional_set(lambda);
        if (F.empty()) break;
        const int f = static_cast<int>(F.size());

        const Eigen::VectorXd vals = alpha - c * lambda;
        const double z = vals.maxCoeff();
        std::vector<int> T;
        for (int i = 0; i < k; ++i)
            if (z - vals[i] <= 1e-9 * (1.0 + std::abs(z))) T.push_back(i);

        // Null direction of the tight constraints restricted to F.
        Eigen::MatrixXd ctf(T.size(), f);
        for (size_t r = 0; r < T.size(); ++r)
            for (int j = 0; j < f; ++j) ctf(r, j) = c(T[r], F[j]);

        Eigen::VectorXd delta_f;
        if (ctf.rows() == 0) {
            delta_f = Eigen::VectorXd::Zero(f);
            delta_f[0] = 1.0;
        } else {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(ctf, Eigen::ComputeFullV);
            const auto& sv = svd.singularValues();
            const double smax = sv.size() > 0 ? sv[0] : 0.0;
            const int rank_limit = std::min<int>(static_cast<int>(ctf.rows()), f);
            const bool rank_deficient =
                sv.size() < rank_limit || sv[rank_limit - 1] < 1e-11 * (1.0 + smax);
            if (f <= static_cast<int>(T.size()) && !rank_deficient) break;  // vertex reached
            delta_f = svd.matrixV().col(f - 1);
        }
        if (delta_f.sum() > 0.0) delta_f = -delta_f;  // trace must not increase

        Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < f; ++j) delta[F[j]] = delta_f[j];

        double t_max = std::numeric_limits<double>::infinity();
        for (int j : F) {
            if (delta[j] > 1e-15) t_max = std::min(t_max, (1.0 - lambda[j]) / delta[j]);
            else if (delta[j] < -1e-15) t_max = std::min(t_max, lambda[j] / -delta[j]);
        }
        const Eigen::VectorXd cd = c * delta;
        for (int i = 0; i < k; ++i) {
            if (std::find(T.begin(), T.end(), i) != T.end()) continue;
            if (cd[i] < -1e-15) t_max = std::min(t_max, (z - vals[i]) / -cd[i]);
        }
        if (!std::isfinite(t_max) || t_max <= 0.0) {
            stalled = true;
            break;
        }
        lambda += t_max * delta;
        snap(lambda);
        if (step == max_steps - 1) stalled = true;
    }

    std::vector<int> F = fractional_set(lambda);
    if (stalled || static_cast<int>(F.size()) > k) {
        // Fall back to exhaustive enumeration over the fractional face.
        if (static_cast<int>(F.size()) > 6)
            throw InternalError("lp_extreme: purification stalled on a face too large to "
                                "enumerate");
        const double z_now = (alpha - c * lambda).maxCoeff();
        double budget = d;
        Eigen::VectorXd alpha_face = alpha;
        for (int j = 0; j < n; ++j) {
            if (std::find(F.begin(), F.end(), j) != F.end()) continue;
            budget -= lambda[j];
            alpha_face -= lambda[j] * c.col(j);
        }
        Eigen::MatrixXd c_face(k, F.size());
        for (size_t jj = 0; jj < F.size(); ++jj) c_face.col(jj) = c.col(F[jj]);
        const VertexResult vr = exhaustive_vertex_enum(c_face, alpha_face, budget, F);
        if (vr.z > z_now + 1e-9)
            throw InternalError("lp_extreme: fallback enumeration worsened the objective");
        for (size_t jj = 0; jj < F.size(); ++jj) lambda[F[jj]] = vr.lambda[jj];
        snap(lambda);
        F = fractional_set(lambda);
        if (static_cast<int>(F.size()) > k)
            throw InternalError("lp_extreme: fractional count exceeds k after fallback");
    }

    LpResult out;
    out.lambda_bar = lambda;
    out.z_star = (alpha - c * lambda).maxCoeff();
    return out;
}

Eigen::VectorXd sqrt_transform(const Eigen::VectorXd& lambda_bar) {
    Eigen::VectorXd out(lambda_bar.size());
    for (int j = 0; j < lambda_bar.size(); ++j) {
        double l = lambda_bar[j];
        if (l < -1e-9 || l > 1.0 + 1e-9)
            throw UsageError("sqrt_transform: lambda_bar outside [0, 1]");
        l = std::min(std::max(l, 0.0), 1.0);
        out[j] = 1.0 - std::sqrt(1.0 - l);
    }
    return out;
}

FairProjection assemble(const SymmetricSpectrum& spectrum, const Eigen::VectorXd& lambda_bar,
                        const Eigen::VectorXd& lambda_star,
                        const std::vector<GroupStats>& stats, int d) {
    const int n = static_cast<int>(spectrum.eigenvalues.size());
    const int k = static_cast<int>(stats.size());
    if (lambda_bar.size() != n || lambda_star.size() != n)
        throw UsageError("assemble: coefficient vectors must have length n");

    std::vector<int> keep;
    int fractional = 0;
    for (int j = 0; j < n; ++j) {
        if (lambda_star[j] > 1e-9) keep.push_back(j);
        if (lambda_bar[j] > kFracTol && lambda_bar[j] < 1.0 - kFracTol) ++fractional;
    }
    const int r = static_cast<int>(keep.size());
    if (r > d + k - 1)
        throw InternalError("assemble: rank bound d+k-1 violated (purification bug)");
    if (fractional > k)
        throw InternalError("assemble: fractional-count bound k violated (purification bug)");

    FairProjection proj;
    proj.basis.resize(n, r);
    proj.lambda_bar.resize(r);
    proj.lambda_star.resize(r);
    for (int jj = 0; jj < r; ++jj) {
        proj.basis.col(jj) = spectrum.eigenvectors.col(keep[jj]);
        proj.lambda_bar[jj] = lambda_bar[keep[jj]];
        proj.lambda_star[jj] = lambda_star[keep[jj]];
    }
    proj.d = d;
    proj.k = k;
    proj.per_group_loss.resize(k);
    double worst = 0.0;
    for (int i = 0; i < k; ++i) {
        const double raw = r > 0 ? loss_affine(stats[i], proj.basis, proj.lambda_star, d)
                                 : stats[i].best_energy_at(d);
        proj.per_group_loss[i] = raw / stats[i].m();
        worst = std::max(worst, proj.per_group_loss[i]);
    }
    proj.objective = worst;
    return proj;
}

Eigen::MatrixXd embed(const Eigen::MatrixXd& X, const FairProjection& proj) {
    if (X.cols() != proj.basis.rows())
        throw UsageError("embed: input has " + std::to_string(X.cols()) +
                         " columns, projection expects " + std::to_string(proj.basis.rows()));
    Eigen::MatrixXd Y = X * proj.basis;
    for (int j = 0; j < proj.r(); ++j) Y.col(j) *= std::sqrt(proj.lambda_star[j]);
    return Y;
}

}  // namespace fairpca
