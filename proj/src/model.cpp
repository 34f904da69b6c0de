#include "fairpca/model.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace fairpca {

namespace {

using nlohmann::json;

json scale_record_to_json(const ScaleRecord& sr) {
    return json{{"mode", to_string(sr.mode)},
                {"column_factors", sr.column_factors},
                {"zero_variance_columns", sr.zero_variance_columns},
                {"width_factor", sr.width_factor},
                {"width_applied", sr.width_applied}};
}

ScaleRecord scale_record_from_json(const json& j) {
    ScaleRecord sr;
    sr.mode = scale_mode_from_string(j.at("mode").get<std::string>());
    sr.column_factors = j.at("column_factors").get<std::vector<double>>();
    sr.zero_variance_columns = j.at("zero_variance_columns").get<std::vector<std::string>>();
    sr.width_factor = j.at("width_factor").get<double>();
    sr.width_applied = j.at("width_applied").get<bool>();
    return sr;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd from_vec(const std::vector<double>& v) {
    Eigen::VectorXd out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
    return out;
}

}  // namespace

ModelFile make_model(const FitResult& fr, const GroupedDataset& ds) {
    ModelFile m;
    m.n = ds.n();
    m.d = fr.projection.d;
    m.k = ds.k();
    m.group_labels = ds.group_labels;
    m.basis = fr.projection.basis;
    m.lambda_bar = fr.projection.lambda_bar;
    m.lambda_star = fr.projection.lambda_star;
    m.objective = fr.projection.objective;
    m.per_group_loss = fr.projection.per_group_loss;
    m.center_vector = fr.center_vector;
    m.scale_record = fr.scale_record;
    m.converged = fr.sdp.converged;
    m.feature_columns = ds.feature_columns;
    m.group_column = ds.group_column;
    return m;
}

void save_model(const ModelFile& m, const std::string& path) {
    // basis is stored row-major: r rows of length n, row j = u_j^T.
    std::vector<double> basis_flat;
    basis_flat.reserve(static_cast<size_t>(m.r()) * m.n);
    for (int j = 0; j < m.r(); ++j)
        for (int i = 0; i < m.n; ++i) basis_flat.push_back(m.basis(i, j));

    json j{{"version", m.version},
           {"n", m.n},
           {"d", m.d},
           {"k", m.k},
           {"group_labels", m.group_labels},
           {"r", m.r()},
           {"basis", basis_flat},
           {"lambda_bar", to_vec(m.lambda_bar)},
           {"lambda_star", to_vec(m.lambda_star)},
           {"objective", m.objective},
           {"per_group_loss", m.per_group_loss},
           {"center_vector", to_vec(m.center_vector)},
           {"scale_record", scale_record_to_json(m.scale_record)},
           {"converged", m.converged},
           {"feature_columns", m.feature_columns},
           {"group_column", m.group_column}};

    std::ofstream out(path);
    if (!out) throw DataError("cannot write model to '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw DataError("failed while writing model to '" + path + "'");
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("model '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        ModelFile m;
        m.version = j.at("version").get<int>();
        if (m.version != 1)
            throw DataError("model '" + path + "' has unsupported version " +
                            std::to_string(m.version));
        m.n = j.at("n").get<int>();
        m.d = j.at("d").get<int>();
        m.k = j.at("k").get<int>();
        m.group_labels = j.at("group_labels").get<std::vector<std::string>>();
        const int r = j.at("r").get<int>();
        const auto basis_flat = j.at("basis").get<std::vector<double>>();
        if (static_cast<int>(basis_flat.size()) != r * m.n)
            throw DataError("model '" + path + "' basis has wrong size");
        m.basis.resize(m.n, r);
        for (int jj = 0; jj < r; ++jj)
            for (int i = 0; i < m.n; ++i)
                m.basis(i, jj) = basis_flat[static_cast<size_t>(jj) * m.n + i];
        m.lambda_bar = from_vec(j.at("lambda_bar").get<std::vector<double>>());
        m.lambda_star = from_vec(j.at("lambda_star").get<std::vector<double>>());
        m.objective = j.at("objective").get<double>();
        m.per_group_loss = j.at("per_group_loss").get<std::vector<double>>();
        m.center_vector = from_vec(j.at("center_vector").get<std::vector<double>>());
        m.scale_record = scale_record_from_json(j.at("scale_record"));
        m.converged = j.at("converged").get<bool>();
        m.feature_columns = j.at("feature_columns").get<std::vector<std::string>>();
        m.group_column = j.at("group_column").get<std::string>();
        return m;
    } catch (const json::exception& e) {
        throw DataError("model '" + path + "' is missing fields: " + e.what());
    }
}

Eigen::MatrixXd apply_preprocess(const ModelFile& m, const Eigen::MatrixXd& raw) {
    if (raw.cols() != m.n)
        throw DataError("input has " + std::to_string(raw.cols()) + " columns, model expects " +
                        std::to_string(m.n));
    Eigen::MatrixXd X = raw;
    if (m.scale_record.mode == ScaleMode::pixel) X *= (1.0 / 255.0);
    X.rowwise() -= m.center_vector.transpose();
    if (m.scale_record.mode == ScaleMode::unit_variance)
        for (int j = 0; j < m.n; ++j) X.col(j) *= m.scale_record.column_factors[j];
    return X;
}

Eigen::MatrixXd model_embed(const ModelFile& m, const Eigen::MatrixXd& raw) {
    Eigen::MatrixXd X = apply_preprocess(m, raw);
    Eigen::MatrixXd Y = X * m.basis;
    for (int j = 0; j < m.r(); ++j) Y.col(j) *= std::sqrt(m.lambda_star[j]);
    return Y;
}

}  // namespace fairpca
