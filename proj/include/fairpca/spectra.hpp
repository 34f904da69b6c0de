#pragma once

#include <Eigen/Dense>

#include "fairpca/errors.hpp"

namespace fairpca {

// Eigendecomposition of a symmetric matrix with a deterministic ordering:
// eigenvalues sorted descending (ties keep their pre-sort diagonal index
// order), and in each eigenvector the first component with |value| > 1e-12
// is made positive. Identical input bits give identical output bits.
struct SymmetricSpectrum {
    Eigen::VectorXd eigenvalues;   // length n, sorted descending
    Eigen::MatrixXd eigenvectors;  // n x n, column j pairs with eigenvalues[j]
};

// A^T A, symmetrized by averaging with its transpose.
Eigen::MatrixXd gram(const Eigen::MatrixXd& A);

// Cyclic Jacobi eigensolver. Requires ||C - C^T||_max <= 1e-8. Sweeps until
// the off-diagonal Frobenius norm drops below 1e-12 * ||C||_F, capped at 100
// sweeps (NumericalError beyond that). Eigenvalues in [-1e-10, 0) are
// reported as 0 (Gram matrices are PSD up to roundoff).
SymmetricSpectrum eig_sym(const Eigen::MatrixXd& C);

// The d leading eigenvectors of C under eig_sym's deterministic ordering,
// as an n x d matrix with orthonormal columns. Requires 1 <= d <= n.
Eigen::MatrixXd pca_top_d(const Eigen::MatrixXd& C, int d);

// Sum of the top d eigenvalues of C: the squared Frobenius norm of the best
// rank-d approximation of any A with A^T A = C. Requires 1 <= d <= n.
double best_rank_d_energy(const Eigen::MatrixXd& C, int d);

}  // namespace fairpca
