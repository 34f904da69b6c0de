#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fairpca/fairpca.hpp"
#include "fairpca/model.hpp"

namespace {

using namespace fairpca;

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------- synth ---

struct SynthRow {
    std::vector<double> x;
    std::string g;
};

std::vector<SynthRow> preset_rows(const std::string& preset) {
    const double rt3 = std::sqrt(3.0);
    if (preset == "cross")
        return {{{1, 0}, "a"},  {{-1, 0}, "a"}, {{2, 0}, "a"}, {{-2, 0}, "a"},
                {{0, 1}, "b"},  {{0, -1}, "b"}, {{0, 2}, "b"}, {{0, -2}, "b"}};
    if (preset == "skew")
        return {{{1, 0}, "a"},  {{-1, 0}, "a"}, {{0, 1}, "a"},
                {{0, -1}, "a"}, {{3, 0}, "b"},  {{-3, 0}, "b"}};
    if (preset == "kaxes")
        return {{{rt3, 0, 0}, "a"},  {{-rt3, 0, 0}, "a"}, {{0, rt3, 0}, "b"},
                {{0, -rt3, 0}, "b"}, {{0, 0, rt3}, "c"},  {{0, 0, -rt3}, "c"}};
    throw UsageError("unknown preset '" + preset + "'");
}

int cmd_synth(const std::string& preset, long seed, const std::string& out_path) {
    std::vector<SynthRow> rows = preset_rows(preset);
    if (seed != 0) {
        std::mt19937_64 rng(static_cast<unsigned long long>(seed));
        std::uniform_real_distribution<double> noise(-1e-6, 1e-6);
        for (auto& r : rows)
            for (double& v : r.x) v += noise(rng);
    }
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write '" + out_path + "'");
    const size_t n = rows[0].x.size();
    for (size_t j = 0; j < n; ++j) out << 'x' << (j + 1) << ',';
    out << "g\n";
    for (const auto& r : rows) {
        for (double v : r.x) out << format_double(v) << ',';
        out << r.g << '\n';
    }
    if (!out) throw DataError("failed while writing '" + out_path + "'");
    return 0;
}

// ------------------------------------------------------------------ fit ---

struct CommonFitFlags {
    std::string input, group_col, scale = "none";
    double eta = 1.0, tol = 1e-5;
    int max_iters = 200;
    std::string iterate_mode = "best";
    bool no_width_norm = false;
};

MwConfig to_config(const CommonFitFlags& f) {
    MwConfig cfg;
    cfg.eta = f.eta;
    cfg.max_iters = f.max_iters;
    cfg.tol = f.tol;
    cfg.iterate_mode = iterate_mode_from_string(f.iterate_mode);
    return cfg;
}

GroupedDataset load_prepared(const CommonFitFlags& f) {
    GroupedDataset ds = load_csv(f.input, f.group_col, scale_mode_from_string(f.scale));
    if (!f.no_width_norm) ds = enforce_width(ds);
    return ds;
}

int cmd_fit(const CommonFitFlags& flags, int dims, const std::string& out_path,
            const std::string& trace_path) {
    if (dims < 1) throw UsageError("--dims must be at least 1");
    const GroupedDataset ds = load_prepared(flags);
    const FitResult fr = fit(ds, dims, to_config(flags));

    const ModelFile model = make_model(fr, ds);
    save_model(model, out_path);
    if (!trace_path.empty()) {
        std::ofstream tout(trace_path);
        if (!tout) throw DataError("cannot write '" + trace_path + "'");
        write_gap_trace_csv(tout, fr.sdp);
    }

    std::cout << "fit: d=" << dims << " rank=" << fr.projection.r()
              << " objective=" << format_double(fr.projection.objective) << '\n';
    for (size_t i = 0; i < fr.projection.per_group_loss.size(); ++i)
        std::cout << "  group " << ds.group_labels[i]
                  << ": avg_loss=" << format_double(fr.projection.per_group_loss[i]) << '\n';
    std::cout << "  vanilla max avg_loss=" << format_double(fr.vanilla_report.max_avg_loss())
              << '\n'
              << "  mw: iterations=" << fr.sdp.iterations
              << " gap=" << format_double(fr.sdp.gap()) << " eta=" << fr.sdp.eta_used
              << (fr.sdp.converged ? " converged" : " NOT CONVERGED") << '\n'
              << "  model written to " << out_path << '\n';

    if (!fr.sdp.converged) {
        std::cerr << "warning: MW did not reach the duality-gap target; "
                     "model flagged converged=false\n";
        return 3;
    }
    return 0;
}

// ------------------------------------------------------------ transform ---

int cmd_transform(const std::string& model_path, const std::string& input_path,
                  const std::string& out_path) {
    const ModelFile model = load_model(model_path);

    std::ifstream in(input_path);
    if (!in) throw DataError("cannot open '" + input_path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + input_path + "' is empty");

    auto split = [](const std::string& s) {
        std::vector<std::string> fields;
        std::string cur;
        for (char ch : s) {
            if (ch == ',') {
                fields.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur += ch;
            }
        }
        fields.push_back(cur);
        return fields;
    };

    const std::vector<std::string> header = split(line);
    int gcol = -1;
    std::vector<std::string> features;
    for (size_t j = 0; j < header.size(); ++j) {
        if (header[j] == model.group_column && gcol < 0) {
            gcol = static_cast<int>(j);
        } else {
            features.push_back(header[j]);
        }
    }
    if (features != model.feature_columns)
        throw DataError("'" + input_path + "' columns do not match the model's feature columns");

    std::vector<std::vector<double>> raw;
    int row = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        ++row;
        const std::vector<std::string> fields = split(line);
        if (fields.size() != header.size())
            throw DataError("data row " + std::to_string(row) + " has wrong field count");
        std::vector<double> vals;
        for (size_t j = 0; j < fields.size(); ++j) {
            if (static_cast<int>(j) == gcol) continue;
            double v = 0.0;
            const std::string& t = fields[j];
            const char* first = t.data();
            if (!t.empty() && *first == '+') ++first;
            auto res = std::from_chars(first, t.data() + t.size(), v);
            if (res.ec != std::errc() || res.ptr != t.data() + t.size())
                throw DataError("non-numeric value '" + t + "' at data row " +
                                std::to_string(row));
            vals.push_back(v);
        }
        raw.push_back(std::move(vals));
    }

    Eigen::MatrixXd X(raw.size(), model.n);
    for (size_t i = 0; i < raw.size(); ++i)
        for (int j = 0; j < model.n; ++j) X(static_cast<int>(i), j) = raw[i][j];
    const Eigen::MatrixXd Y =
        raw.empty() ? Eigen::MatrixXd(0, model.r()) : model_embed(model, X);

    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write '" + out_path + "'");
    for (int j = 0; j < model.r(); ++j) out << 'u' << (j + 1) << (j + 1 < model.r() ? "," : "");
    out << '\n';
    for (int i = 0; i < Y.rows(); ++i) {
        for (int j = 0; j < Y.cols(); ++j)
            out << format_double(Y(i, j)) << (j + 1 < Y.cols() ? "," : "");
        out << '\n';
    }
    if (!out) throw DataError("failed while writing '" + out_path + "'");
    return 0;
}

// ---------------------------------------------------------------- audit ---

std::pair<int, int> parse_dims_range(const std::string& s) {
    const size_t pos = s.find("..");
    int a = 0, b = 0;
    auto parse_int = [&s](const std::string& tok) {
        int v = 0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw UsageError("bad dimension '" + tok + "' in range '" + s + "'");
        return v;
    };
    if (pos == std::string::npos) {
        a = b = parse_int(s);
    } else {
        a = parse_int(s.substr(0, pos));
        b = parse_int(s.substr(pos + 2));
    }
    if (a < 1 || b < a) throw UsageError("empty or invalid dimension range '" + s + "'");
    return {a, b};
}

int cmd_audit(const CommonFitFlags& flags, const std::string& dims, const std::string& methods,
              const std::string& out_path) {
    const auto [lo, hi] = parse_dims_range(dims);
    const bool want_vanilla = methods == "both" || methods == "vanilla";
    const bool want_fair = methods == "both" || methods == "fair";
    if (!want_vanilla && !want_fair)
        throw UsageError("--methods must be vanilla, fair, or both");

    const GroupedDataset ds = load_prepared(flags);
    std::vector<int> d_range;
    for (int d = lo; d <= hi; ++d) d_range.push_back(d);

    std::vector<LossReport> rows;
    bool all_converged = true;
    if (!want_fair) {
        for (int d : d_range) rows.push_back(fit_vanilla(ds, d).second);
    } else {
        std::vector<LossReport> both = sweep(ds, d_range, to_config(flags));
        for (LossReport& rep : both) {
            if (rep.method == "fair" && !rep.converged) all_converged = false;
            if ((rep.method == "vanilla" && want_vanilla) || (rep.method == "fair" && want_fair))
                rows.push_back(std::move(rep));
        }
    }

    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write '" + out_path + "'");
    write_report_csv(out, rows);
    if (!out) throw DataError("failed while writing '" + out_path + "'");
    std::cout << "audit: wrote " << out_path << " (dims " << lo << ".." << hi << ", methods "
              << methods << ")\n";
    if (!all_converged) {
        std::cerr << "warning: at least one fair solve missed the duality-gap target\n";
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fair PCA: min-max per-group reconstruction loss projections"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "write a small synthetic grouped CSV");
    std::string preset, synth_out;
    long seed = 0;
    synth->add_option("--preset", preset, "cross | skew | kaxes")->required();
    synth->add_option("--seed", seed, "0 = exact fixture; otherwise adds noise <= 1e-6");
    synth->add_option("--out", synth_out, "output CSV path")->required();

    // fit
    auto* fitc = app.add_subcommand("fit", "fit a fair projection and write a model JSON");
    CommonFitFlags ff;
    int dims = 0;
    std::string model_out, trace_out;
    fitc->add_option("--input", ff.input)->required();
    fitc->add_option("--group-col", ff.group_col)->required();
    fitc->add_option("--dims", dims, "target dimension d")->required();
    fitc->add_option("--eta", ff.eta, "MW learning rate (default 1.0)");
    fitc->add_option("--max-iters", ff.max_iters, "MW oracle-call cap (default 200)");
    fitc->add_option("--tol", ff.tol, "duality-gap target (default 1e-5)");
    fitc->add_option("--iterate-mode", ff.iterate_mode, "average | last | best");
    fitc->add_option("--scale", ff.scale, "none | pixel | unit-variance");
    fitc->add_flag("--no-width-norm", ff.no_width_norm, "skip width normalization before MW");
    fitc->add_option("--out", model_out, "model JSON path")->required();
    fitc->add_option("--trace", trace_out, "optional per-iteration gap trace CSV");

    // transform
    auto* trans = app.add_subcommand("transform", "embed rows with a fitted model");
    std::string t_model, t_input, t_out;
    trans->add_option("--model", t_model)->required();
    trans->add_option("--input", t_input)->required();
    trans->add_option("--out", t_out)->required();

    // audit
    auto* auditc = app.add_subcommand("audit", "per-group error/loss report over a dim range");
    CommonFitFlags af;
    std::string dims_range, methods = "both", audit_out;
    auditc->add_option("--input", af.input)->required();
    auditc->add_option("--group-col", af.group_col)->required();
    auditc->add_option("--dims", dims_range, "dimension range a..b (or a single a)")->required();
    auditc->add_option("--methods", methods, "vanilla | fair | both (default both)");
    auditc->add_option("--eta", af.eta);
    auditc->add_option("--max-iters", af.max_iters);
    auditc->add_option("--tol", af.tol);
    auditc->add_option("--iterate-mode", af.iterate_mode);
    auditc->add_option("--scale", af.scale, "none | pixel | unit-variance");
    auditc->add_flag("--no-width-norm", af.no_width_norm);
    auditc->add_option("--out", audit_out, "report CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (synth->parsed()) return cmd_synth(preset, seed, synth_out);
        if (fitc->parsed()) return cmd_fit(ff, dims, model_out, trace_out);
        if (trans->parsed()) return cmd_transform(t_model, t_input, t_out);
        if (auditc->parsed()) return cmd_audit(af, dims_range, methods, audit_out);
        std::cerr << "usage error: no subcommand\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
