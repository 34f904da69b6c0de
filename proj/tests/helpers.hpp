#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fairpca/fairpca.hpp"

// Shared fixtures and generators for the test binaries. Doctest-free so the
// acceptance binary can reuse them.
namespace testutil {

inline fairpca::GroupedDataset dataset_from_rows(
    const Eigen::MatrixXd& rows, const std::vector<int>& group_of_row,
    const std::vector<std::string>& labels,
    fairpca::ScaleMode mode = fairpca::ScaleMode::none) {
    std::vector<std::string> feature_columns;
    for (int j = 0; j < rows.cols(); ++j)
        feature_columns.push_back("x" + std::to_string(j + 1));
    return fairpca::make_dataset(rows, group_of_row, labels, feature_columns, "g", mode);
}

// Two axis-aligned groups whose pooled spectrum is degenerate: group a spans
// e1 with energy 10, group b spans e2 with energy 10; m = 4 each.
inline fairpca::GroupedDataset make_cross() {
    Eigen::MatrixXd rows(8, 2);
    rows << 1, 0, -1, 0, 2, 0, -2, 0, 0, 1, 0, -1, 0, 2, 0, -2;
    return dataset_from_rows(rows, {0, 0, 0, 0, 1, 1, 1, 1}, {"a", "b"});
}

// Group a isotropic (gram diag(2,2), m=4), group b on e1 (gram diag(18,0),
// m=2): every direction costs a the same, so the fair optimum is e1 with
// objective 0.
inline fairpca::GroupedDataset make_skew() {
    Eigen::MatrixXd rows(6, 2);
    rows << 1, 0, -1, 0, 0, 1, 0, -1, 3, 0, -3, 0;
    return dataset_from_rows(rows, {0, 0, 0, 0, 1, 1}, {"a", "b"});
}

// Three groups on the three axes of R^3, grams diag(6,0,0)/diag(0,6,0)/
// diag(0,0,6), m = 2 each; symmetry forces lambda_bar = (1/3,1/3,1/3) at
// d = 1 with objective 2.0.
inline fairpca::GroupedDataset make_kaxes() {
    const double r = std::sqrt(3.0);
    Eigen::MatrixXd rows(6, 3);
    rows << r, 0, 0, -r, 0, 0, 0, r, 0, 0, -r, 0, 0, 0, r, 0, 0, -r;
    return dataset_from_rows(rows, {0, 0, 1, 1, 2, 2}, {"a", "b", "c"});
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = gauss(rng);
    return M;
}

inline Eigen::MatrixXd random_orthonormal(std::mt19937_64& rng, int n, int d) {
    const Eigen::MatrixXd M = random_matrix(rng, n, d);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    Eigen::MatrixXd Q = qr.householderQ();
    return Q.leftCols(d);
}

// Gaussian groups with a per-group spread factor in [0.5, 2]; sizes drawn
// uniformly from [m_lo, m_hi]; mode none (centered only).
inline fairpca::GroupedDataset random_grouped(std::mt19937_64& rng, int n, int k, int m_lo,
                                              int m_hi) {
    std::uniform_int_distribution<int> size_dist(m_lo, m_hi);
    std::uniform_real_distribution<double> spread(0.5, 2.0);
    std::vector<Eigen::MatrixXd> blocks;
    std::vector<int> group_of_row;
    std::vector<std::string> labels;
    int total = 0;
    for (int g = 0; g < k; ++g) {
        const int mg = size_dist(rng);
        blocks.push_back(spread(rng) * random_matrix(rng, mg, n));
        labels.push_back("g" + std::to_string(g));
        for (int i = 0; i < mg; ++i) group_of_row.push_back(g);
        total += mg;
    }
    Eigen::MatrixXd rows(total, n);
    int at = 0;
    for (const auto& b : blocks) {
        rows.middleRows(at, static_cast<int>(b.rows())) = b;
        at += static_cast<int>(b.rows());
    }
    return dataset_from_rows(rows, group_of_row, labels);
}

inline std::string temp_path(const std::string& name) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() / "fairpca_tests";
    std::filesystem::create_directories(dir);
    return (dir / (std::to_string(++counter) + "_" + name)).string();
}

inline std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = temp_path(name);
    std::ofstream out(path);
    out << content;
    return path;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testutil
