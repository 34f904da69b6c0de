#pragma once

#include <Eigen/Dense>

#include <vector>

#include "fairpca/losses.hpp"

namespace fairpca {

// Brute-force verification oracles. Never on the production path; used by
// tests to certify optimizer output independently.

struct GridResult {
    Eigen::VectorXd best_direction;  // unit vector, n in {2, 3}
    double z_grid = 0.0;             // min over the grid of max avg loss
    double resolution = 0.0;         // grid step in radians
};

// Exhaustive d=1 sweep: the unit circle in steps of `resolution` radians
// (n = 2) or a Fibonacci sphere with ceil(4*pi/resolution^2) points (n = 3).
// Ties broken by lowest grid index. UsageError for n > 3.
GridResult grid_search_d1(const std::vector<GroupStats>& stats, double resolution);

struct VertexResult {
    Eigen::VectorXd lambda;  // coordinates over the face, in face order
    double z = 0.0;
};

// Enumerate all basic feasible points of the restricted LP
//   min_z { z >= alpha_i - sum_j c_ij l_j, sum l <= budget, 0 <= l <= 1 }
// over the |face| free coordinates and return the best vertex. c is
// k x |face|. UsageError when |face| > 6 (combinatorial guard).
VertexResult exhaustive_vertex_enum(const Eigen::MatrixXd& c, const Eigen::VectorXd& alpha,
                                    double budget, const std::vector<int>& face);

}  // namespace fairpca
