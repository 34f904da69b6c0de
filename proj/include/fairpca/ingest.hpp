#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "fairpca/errors.hpp"

namespace fairpca {

enum class ScaleMode { none, pixel, unit_variance };

ScaleMode scale_mode_from_string(const std::string& s);  // UsageError on unknown
std::string to_string(ScaleMode mode);

// Record of every transformation applied on load, sufficient to replay the
// preprocessing on new rows (cmd_transform) and to un-scale reported losses
// when width normalization is active.
struct ScaleRecord {
    ScaleMode mode = ScaleMode::none;
    // Per-column multiplier applied after centering (unit-variance mode);
    // empty for none/pixel. Zero-variance columns keep factor 1.
    std::vector<double> column_factors;
    std::vector<std::string> zero_variance_columns;
    // Global row multiplier applied by enforce_width (1.0 when inactive).
    // Losses computed on the scaled rows are s^2 times the raw ones.
    double width_factor = 1.0;
    bool width_applied = false;
};

struct GroupedDataset {
    Eigen::MatrixXd rows;                      // m x n, centered (and scaled)
    std::vector<int> group_of_row;             // index into group_labels
    std::vector<std::string> group_labels;     // ordered by first appearance
    std::vector<std::string> feature_columns;  // numeric column names
    std::string group_column;
    Eigen::VectorXd center_vector;  // subtracted from all rows (post-pixel units)
    ScaleRecord scale_record;

    int m() const { return static_cast<int>(rows.rows()); }
    int n() const { return static_cast<int>(rows.cols()); }
    int k() const { return static_cast<int>(group_labels.size()); }
    Eigen::MatrixXd group_rows(int gi) const;
    int group_size(int gi) const;
};

// Parse a headered, comma-separated CSV; the group column may appear at any
// position and is removed from the numeric matrix. Pixel scaling (x 1/255)
// is applied before centering, unit-variance scaling after it; zero-variance
// columns are left unscaled and recorded. DataError on unreadable files,
// missing columns, or non-numeric cells (with row and column in the message).
GroupedDataset load_csv(const std::string& path, const std::string& group_column,
                        ScaleMode mode);

// Centering + scaling applied to an in-memory matrix; shared by load_csv,
// cmd_synth, and tests.
GroupedDataset make_dataset(Eigen::MatrixXd raw_rows, std::vector<int> group_of_row,
                            std::vector<std::string> group_labels,
                            std::vector<std::string> feature_columns,
                            std::string group_column, ScaleMode mode);

// Multiply all rows by one global scalar s = min(1, 1/sqrt(max_i lambda_max
// of (1/m_i) A_i^T A_i)) so every group's normalized Gram has top eigenvalue
// <= 1; s is recorded in scale_record. All-zero data gives s = 1.
GroupedDataset enforce_width(const GroupedDataset& ds);

}  // namespace fairpca
