#include "fairpca/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace fairpca {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& A) {
    const int n = static_cast<int>(A.rows());
    double s = 0.0;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            if (p != q) s += A(p, q) * A(p, q);
    return std::sqrt(s);
}

}  // namespace

Eigen::MatrixXd gram(const Eigen::MatrixXd& A) {
    if (A.cols() < 1) throw UsageError("gram: matrix must have at least one column");
    Eigen::MatrixXd G = A.transpose() * A;
    return 0.5 * (G + G.transpose());
}

SymmetricSpectrum eig_sym(const Eigen::MatrixXd& C) {
    const int n = static_cast<int>(C.rows());
    if (n < 1 || C.cols() != n) throw UsageError("eig_sym: matrix must be square and nonempty");
    if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-8)
        throw UsageError("eig_sym: input is not symmetric within 1e-8");

    Eigen::MatrixXd A = 0.5 * (C + C.transpose());
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
    const double stop = 1e-12 * A.norm();

    int sweep = 0;
    while (off_diagonal_norm(A) > stop) {
        if (++sweep > 100)
            throw NumericalError("eig_sym: Jacobi iteration did not converge in 100 sweeps");
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e154) {
                    t = 1.0 / (2.0 * theta);
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                A(p, p) -= t * apq;
                A(q, q) += t * apq;
                A(p, q) = 0.0;
                A(q, p) = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = A(r, p);
                    const double arq = A(r, q);
                    A(r, p) = arp - s * (arq + tau * arp);
                    A(p, r) = A(r, p);
                    A(r, q) = arq + s * (arp - tau * arq);
                    A(q, r) = A(r, q);
                }
                for (int r = 0; r < n; ++r) {
                    const double qrp = Q(r, p);
                    const double qrq = Q(r, q);
                    Q(r, p) = qrp - s * (qrq + tau * qrp);
                    Q(r, q) = qrq + s * (qrp - tau * qrq);
                }
            }
        }
    }

    Eigen::VectorXd vals = A.diagonal();
    for (int i = 0; i < n; ++i)
        if (vals[i] < 0.0 && vals[i] >= -1e-10) vals[i] = 0.0;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&vals](int a, int b) { return vals[a] > vals[b]; });

    SymmetricSpectrum out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (int j = 0; j < n; ++j) {
        out.eigenvalues[j] = vals[order[j]];
        Eigen::VectorXd v = Q.col(order[j]);
        for (int i = 0; i < n; ++i) {
            if (std::abs(v[i]) > 1e-12) {
                if (v[i] < 0.0) v = -v;
                break;
            }
        }
        out.eigenvectors.col(j) = v;
    }
    return out;
}

Eigen::MatrixXd pca_top_d(const Eigen::MatrixXd& C, int d) {
    const int n = static_cast<int>(C.rows());
    if (d < 1 || d > n) throw UsageError("pca_top_d: need 1 <= d <= n");
    return eig_sym(C).eigenvectors.leftCols(d);
}

double best_rank_d_energy(const Eigen::MatrixXd& C, int d) {
    const int n = static_cast<int>(C.rows());
    if (d < 1 || d > n) throw UsageError("best_rank_d_energy: need 1 <= d <= n");
    return eig_sym(C).eigenvalues.head(d).sum();
}

}  // namespace fairpca
