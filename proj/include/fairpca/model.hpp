#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "fairpca/fairpca.hpp"

namespace fairpca {

// Serialized fit: everything needed to embed new rows and to audit what was
// trained. JSON on disk, version 1. Doubles round-trip bitwise.
struct ModelFile {
    int version = 1;
    int n = 0;
    int d = 0;
    int k = 0;
    std::vector<std::string> group_labels;
    Eigen::MatrixXd basis;        // n x r in memory; r x n row-major in JSON
    Eigen::VectorXd lambda_bar;   // length r
    Eigen::VectorXd lambda_star;  // length r
    double objective = 0.0;
    std::vector<double> per_group_loss;
    Eigen::VectorXd center_vector;
    ScaleRecord scale_record;
    bool converged = true;
    std::vector<std::string> feature_columns;
    std::string group_column;

    int r() const { return static_cast<int>(basis.cols()); }
};

ModelFile make_model(const FitResult& fr, const GroupedDataset& ds);

void save_model(const ModelFile& model, const std::string& path);
ModelFile load_model(const std::string& path);  // DataError on IO/parse/version

// Replay the stored preprocessing on raw rows: pixel factor, then centering,
// then unit-variance factors. The width factor is intentionally not applied;
// embeddings live in user coordinates.
Eigen::MatrixXd apply_preprocess(const ModelFile& model, const Eigen::MatrixXd& raw);

// apply_preprocess followed by the sqrt(l*)-weighted basis projection.
Eigen::MatrixXd model_embed(const ModelFile& model, const Eigen::MatrixXd& raw);

}  // namespace fairpca
