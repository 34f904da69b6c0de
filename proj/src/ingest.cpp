#include "fairpca/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "fairpca/spectra.hpp"

namespace fairpca {

ScaleMode scale_mode_from_string(const std::string& s) {
    if (s == "none") return ScaleMode::none;
    if (s == "pixel") return ScaleMode::pixel;
    if (s == "unit-variance") return ScaleMode::unit_variance;
    throw UsageError("unknown scale mode '" + s + "' (expected none, pixel, or unit-variance)");
}

std::string to_string(ScaleMode mode) {
    switch (mode) {
        case ScaleMode::none: return "none";
        case ScaleMode::pixel: return "pixel";
        case ScaleMode::unit_variance: return "unit-variance";
    }
    throw InternalError("unhandled ScaleMode");
}

Eigen::MatrixXd GroupedDataset::group_rows(int gi) const {
    Eigen::MatrixXd out(group_size(gi), n());
    int r = 0;
    for (int i = 0; i < m(); ++i)
        if (group_of_row[i] == gi) out.row(r++) = rows.row(i);
    return out;
}

int GroupedDataset::group_size(int gi) const {
    return static_cast<int>(std::count(group_of_row.begin(), group_of_row.end(), gi));
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(cur);
    for (auto& f : fields) f = trim(f);
    return fields;
}

double parse_cell(const std::string& cell, int row, const std::string& column) {
    const std::string t = trim(cell);
    if (t.empty())
        throw DataError("missing value at data row " + std::to_string(row) + ", column '" +
                        column + "'");
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (*first == '+') ++first;  // from_chars rejects a leading plus
    double value = 0.0;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
        throw DataError("non-numeric value '" + t + "' at data row " + std::to_string(row) +
                        ", column '" + column + "'");
    return value;
}

}  // namespace

GroupedDataset make_dataset(Eigen::MatrixXd raw_rows, std::vector<int> group_of_row,
                            std::vector<std::string> group_labels,
                            std::vector<std::string> feature_columns,
                            std::string group_column, ScaleMode mode) {
    const int m = static_cast<int>(raw_rows.rows());
    const int n = static_cast<int>(raw_rows.cols());
    if (m < 1) throw DataError("dataset has no data rows");
    if (static_cast<int>(group_of_row.size()) != m)
        throw UsageError("make_dataset: one group index per row required");
    for (int g : group_of_row)
        if (g < 0 || g >= static_cast<int>(group_labels.size()))
            throw UsageError("make_dataset: group index out of range");

    GroupedDataset ds;
    ds.scale_record.mode = mode;

    if (mode == ScaleMode::pixel) raw_rows *= (1.0 / 255.0);

    Eigen::VectorXd mean = raw_rows.colwise().mean();
    raw_rows.rowwise() -= mean.transpose();

    if (mode == ScaleMode::unit_variance) {
        ds.scale_record.column_factors.assign(n, 1.0);
        for (int j = 0; j < n; ++j) {
            const double absmax = m > 0 ? raw_rows.col(j).cwiseAbs().maxCoeff() : 0.0;
            const double stddev = std::sqrt(raw_rows.col(j).squaredNorm() / m);
            if (stddev <= 1e-14 * (1.0 + absmax)) {
                ds.scale_record.zero_variance_columns.push_back(feature_columns[j]);
            } else {
                ds.scale_record.column_factors[j] = 1.0 / stddev;
                raw_rows.col(j) *= ds.scale_record.column_factors[j];
            }
        }
    }

    ds.rows = std::move(raw_rows);
    ds.group_of_row = std::move(group_of_row);
    ds.group_labels = std::move(group_labels);
    ds.feature_columns = std::move(feature_columns);
    ds.group_column = std::move(group_column);
    ds.center_vector = std::move(mean);
    return ds;
}

GroupedDataset load_csv(const std::string& path, const std::string& group_column,
                        ScaleMode mode) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + path + "' is empty (no header row)");
    const std::vector<std::string> header = split_csv_line(line);

    int gcol = -1;
    for (size_t j = 0; j < header.size(); ++j)
        if (header[j] == group_column) gcol = static_cast<int>(j);
    if (gcol < 0)
        throw DataError("group column '" + group_column + "' not found in '" + path + "'");

    std::vector<std::string> feature_columns;
    for (size_t j = 0; j < header.size(); ++j)
        if (static_cast<int>(j) != gcol) feature_columns.push_back(header[j]);
    const int n = static_cast<int>(feature_columns.size());
    if (n < 1) throw DataError("'" + path + "' has no numeric columns besides the group column");

    std::vector<double> values;
    std::vector<int> group_of_row;
    std::vector<std::string> labels;
    std::unordered_map<std::string, int> label_index;
    int row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError("data row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
        const std::string label = fields[gcol];
        if (label.empty())
            throw DataError("missing group label at data row " + std::to_string(row));
        auto it = label_index.find(label);
        if (it == label_index.end()) {
            it = label_index.emplace(label, static_cast<int>(labels.size())).first;
            labels.push_back(label);
        }
        group_of_row.push_back(it->second);
        int fj = 0;
        for (size_t j = 0; j < fields.size(); ++j) {
            if (static_cast<int>(j) == gcol) continue;
            values.push_back(parse_cell(fields[j], row, header[j]));
            ++fj;
        }
    }
    if (row == 0) throw DataError("'" + path + "' has no data rows");

    Eigen::MatrixXd raw(row, n);
    for (int i = 0; i < row; ++i)
        for (int j = 0; j < n; ++j) raw(i, j) = values[static_cast<size_t>(i) * n + j];

    return make_dataset(std::move(raw), std::move(group_of_row), std::move(labels),
                        std::move(feature_columns), group_column, mode);
}

GroupedDataset enforce_width(const GroupedDataset& ds) {
    double max_top = 0.0;
    for (int gi = 0; gi < ds.k(); ++gi) {
        const Eigen::MatrixXd A = ds.group_rows(gi);
        const int mi = static_cast<int>(A.rows());
        if (mi == 0) throw DataError("group '" + ds.group_labels[gi] + "' has no rows");
        const Eigen::MatrixXd G = gram(A) / mi;
        max_top = std::max(max_top, eig_sym(G).eigenvalues[0]);
    }
    const double s = max_top > 1.0 ? 1.0 / std::sqrt(max_top) : 1.0;

    GroupedDataset out = ds;
    out.rows *= s;
    out.scale_record.width_factor = s;
    out.scale_record.width_applied = true;
    return out;
}

}  // namespace fairpca
