#pragma once

#include <Eigen/Dense>

#include <vector>

#include "fairpca/losses.hpp"
#include "fairpca/spectra.hpp"

namespace fairpca {

// The final fair projection: an affine rank-r map P* = sum_j l*_j u_j u_j^T
// built from an extreme point lambda_bar of the rounding LP through the
// sqrt-transform l* = 1 - sqrt(1 - lambda_bar). Guarantees (checked):
// r <= d + k - 1, at most k fractional lambda_bar, 2 l* - l*^2 = lambda_bar
// to 1e-12, and equal per-group losses whenever k = 2 and r = d + 1.
struct FairProjection {
    Eigen::MatrixXd basis;        // n x r, orthonormal columns u_j
    Eigen::VectorXd lambda_bar;   // length r, in [0, 1]
    Eigen::VectorXd lambda_star;  // length r, in (0, 1]
    int d = 0;                    // requested dimension
    int k = 0;                    // group count
    double objective = 0.0;       // max per-group average loss
    std::vector<double> per_group_loss;

    int r() const { return static_cast<int>(basis.cols()); }
    Eigen::MatrixXd P_star() const;  // explicit n x n matrix (tests/diagnostics)
};

struct LpResult {
    Eigen::VectorXd lambda_bar;  // length n, feasible extreme point
    double z_star = 0.0;         // objective at lambda_bar
};

// Purify the eigenvalues of the SDP solution to an extreme point of the LP
// min_z { z >= alpha_i - sum_j c_ij l_j, sum l <= d, 0 <= l <= 1 } in the
// eigenbasis, never increasing the objective: repeatedly move along a null
// direction of the tight constraints (oriented so the trace does not grow)
// until a coordinate hits a bound or a slack constraint becomes tight.
// Ends with at most k fractional coordinates. Falls back to exhaustive
// vertex enumeration on the fractional face if the walk stalls.
LpResult lp_extreme(const SymmetricSpectrum& spectrum, const std::vector<GroupStats>& stats,
                    int d);

// l*_j = 1 - sqrt(1 - lambda_bar_j); the identity 2 l* - l*^2 = lambda_bar
// holds to machine precision. Inputs outside [0,1] by more than 1e-9 raise
// UsageError; within that, they are clipped.
Eigen::VectorXd sqrt_transform(const Eigen::VectorXd& lambda_bar);

// Drop coordinates with l* <= 1e-9, keep the corresponding eigenvectors, and
// evaluate per-group losses. InternalError if the rank or fractional-count
// bound is violated (purification bug).
FairProjection assemble(const SymmetricSpectrum& spectrum, const Eigen::VectorXd& lambda_bar,
                        const Eigen::VectorXd& lambda_star,
                        const std::vector<GroupStats>& stats, int d);

// Row-wise embedding into r-space: output column j = sqrt(l*_j) * (X u_j).
Eigen::MatrixXd embed(const Eigen::MatrixXd& X, const FairProjection& proj);

}  // namespace fairpca
