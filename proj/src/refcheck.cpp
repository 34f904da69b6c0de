#include "fairpca/refcheck.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace fairpca {

GridResult grid_search_d1(const std::vector<GroupStats>& stats, double resolution) {
    if (stats.empty()) throw UsageError("grid_search_d1: no groups");
    if (!(resolution > 0.0) || resolution > 1.0)
        throw UsageError("grid_search_d1: resolution must lie in (0, 1]");
    const int n = stats[0].n();
    if (n != 2 && n != 3) throw UsageError("grid_search_d1: only n in {2, 3} supported");

    const int k = static_cast<int>(stats.size());
    std::vector<Eigen::MatrixXd> B(k);
    Eigen::VectorXd alpha(k);
    for (int i = 0; i < k; ++i) {
        if (stats[i].n() != n) throw UsageError("grid_search_d1: stats dimension mismatch");
        B[i] = stats[i].gram() / stats[i].m();
        alpha[i] = stats[i].best_energy_at(1) / stats[i].m();
    }

    GridResult out;
    out.resolution = resolution;
    out.z_grid = std::numeric_limits<double>::infinity();
    out.best_direction = Eigen::VectorXd::Zero(n);

    if (n == 2) {
        double b00[4], b01[4], b11[4];
        for (int i = 0; i < k && i < 4; ++i) {
            b00[i] = B[i](0, 0);
            b01[i] = B[i](0, 1);
            b11[i] = B[i](1, 1);
        }
        const long steps = static_cast<long>(std::ceil(std::numbers::pi / resolution));
        for (long j = 0; j < steps; ++j) {
            const double th = j * resolution;
            const double x = std::cos(th), y = std::sin(th);
            double z = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < k; ++i) {
                const double quad = i < 4 ? b00[i] * x * x + 2.0 * b01[i] * x * y + b11[i] * y * y
                                          : B[i](0, 0) * x * x + 2.0 * B[i](0, 1) * x * y +
                                                B[i](1, 1) * y * y;
                z = std::max(z, alpha[i] - quad);
            }
            if (z < out.z_grid) {
                out.z_grid = z;
                out.best_direction << x, y;
            }
        }
    } else {
        // Fibonacci sphere covering with ~resolution^2 area per point.
        const long count =
            static_cast<long>(std::ceil(4.0 * std::numbers::pi / (resolution * resolution)));
        const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
        std::vector<std::array<double, 6>> q(k);  // packed symmetric 3x3
        for (int i = 0; i < k; ++i)
            q[i] = {B[i](0, 0), B[i](1, 1), B[i](2, 2), B[i](0, 1), B[i](0, 2), B[i](1, 2)};
        for (long j = 0; j < count; ++j) {
            const double zc = 1.0 - 2.0 * (j + 0.5) / count;
            const double rr = std::sqrt(std::max(0.0, 1.0 - zc * zc));
            const double phi = golden_angle * j;
            const double x = rr * std::cos(phi), y = rr * std::sin(phi);
            double z = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < k; ++i) {
                const auto& b = q[i];
                const double quad = b[0] * x * x + b[1] * y * y + b[2] * zc * zc +
                                    2.0 * (b[3] * x * y + b[4] * x * zc + b[5] * y * zc);
                z = std::max(z, alpha[i] - quad);
            }
            if (z < out.z_grid) {
                out.z_grid = z;
                out.best_direction << x, y, zc;
            }
        }
    }
    return out;
}

namespace {

// Feasibility check shared by all candidate vertices.
bool feasible(const Eigen::VectorXd& lambda, double z, const Eigen::MatrixXd& c,
              const Eigen::VectorXd& alpha, double budget) {
    if (lambda.minCoeff() < -1e-9 || lambda.maxCoeff() > 1.0 + 1e-9) return false;
    if (lambda.sum() > budget + 1e-9) return false;
    const Eigen::VectorXd vals = alpha - c * lambda;
    return vals.maxCoeff() <= z + 1e-9;
}

}  // namespace

VertexResult exhaustive_vertex_enum(const Eigen::MatrixXd& c, const Eigen::VectorXd& alpha,
                                    double budget, const std::vector<int>& face) {
    const int f = static_cast<int>(face.size());
    const int k = static_cast<int>(alpha.size());
    if (f > 6) throw UsageError("exhaustive_vertex_enum: face larger than 6");
    if (f < 1) throw UsageError("exhaustive_vertex_enum: empty face");
    if (c.rows() != k || c.cols() != f)
        throw UsageError("exhaustive_vertex_enum: coefficient matrix must be k x |face|");
    if (k > 16) throw UsageError("exhaustive_vertex_enum: too many groups");
    if (budget < -1e-9) throw UsageError("exhaustive_vertex_enum: negative budget");

    VertexResult best;
    best.z = std::numeric_limits<double>::infinity();

    std::vector<int> state(f, 0);  // 0 = at 0, 1 = at 1, 2 = free
    long total = 1;
    for (int j = 0; j < f; ++j) total *= 3;

    for (long code = 0; code < total; ++code) {
        long rem = code;
        std::vector<int> free_idx;
        Eigen::VectorXd lambda = Eigen::VectorXd::Zero(f);
        for (int j = 0; j < f; ++j) {
            state[j] = static_cast<int>(rem % 3);
            rem /= 3;
            if (state[j] == 1) lambda[j] = 1.0;
            if (state[j] == 2) free_idx.push_back(j);
        }
        const int nf = static_cast<int>(free_idx.size());

        if (nf == 0) {
            const double z = (alpha - c * lambda).maxCoeff();
            if (feasible(lambda, z, c, alpha, budget) && z < best.z) {
                best.z = z;
                best.lambda = lambda;
            }
            continue;
        }

        // A vertex with nf free coordinates needs nf + 1 more tight
        // constraints (the free lambdas plus z): some subset of group
        // constraints, optionally with the trace constraint.
        for (int trace_tight = 0; trace_tight <= 1; ++trace_tight) {
            const int need = nf + 1 - trace_tight;
            if (need < 1 || need > k) continue;
            // enumerate subsets of [k] of size `need`
            std::vector<int> sel(need);
            for (int i = 0; i < need; ++i) sel[i] = i;
            while (true) {
                Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nf + 1, nf + 1);
                Eigen::VectorXd rhs(nf + 1);
                for (int r = 0; r < need; ++r) {
                    const int gi = sel[r];
                    for (int jj = 0; jj < nf; ++jj) M(r, jj) = c(gi, free_idx[jj]);
                    M(r, nf) = 1.0;  // z column
                    double adj = alpha[gi];
                    for (int j = 0; j < f; ++j)
                        if (state[j] == 1) adj -= c(gi, j);
                    rhs[r] = adj;
                }
                if (trace_tight) {
                    for (int jj = 0; jj < nf; ++jj) M(need, jj) = 1.0;
                    double fixed = 0.0;
                    for (int j = 0; j < f; ++j)
                        if (state[j] == 1) fixed += 1.0;
                    rhs[need] = budget - fixed;
                }
                Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
                if (lu.isInvertible()) {
                    const Eigen::VectorXd sol = lu.solve(rhs);
                    Eigen::VectorXd cand = lambda;
                    for (int jj = 0; jj < nf; ++jj) cand[free_idx[jj]] = sol[jj];
                    const double z = sol[nf];
                    Eigen::VectorXd clipped = cand.cwiseMax(0.0).cwiseMin(1.0);
                    if (feasible(cand, z, c, alpha, budget) && z < best.z) {
                        best.z = z;
                        best.lambda = clipped;
                    }
                }
                // next subset
                int pos = need - 1;
                while (pos >= 0 && sel[pos] == k - need + pos) --pos;
                if (pos < 0) break;
                ++sel[pos];
                for (int i = pos + 1; i < need; ++i) sel[i] = sel[i - 1] + 1;
            }
        }
    }

    if (!std::isfinite(best.z))
        throw InternalError("exhaustive_vertex_enum: no feasible vertex found");
    return best;
}

}  // namespace fairpca
