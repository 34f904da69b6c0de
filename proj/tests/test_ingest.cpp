#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fairpca/ingest.hpp"
#include "fairpca/spectra.hpp"
#include "helpers.hpp"

using namespace fairpca;

TEST_CASE("load_csv centers a small two-group file") {
    const std::string path = testutil::write_temp(
        "basic.csv", "x,y,g\n1,2,a\n3,4,a\n5,6,b\n7,8,b\n");
    const GroupedDataset ds = load_csv(path, "g", ScaleMode::none);
    CHECK(ds.m() == 4);
    CHECK(ds.n() == 2);
    CHECK(ds.k() == 2);
    CHECK(ds.group_labels == std::vector<std::string>{"a", "b"});
    CHECK(ds.feature_columns == std::vector<std::string>{"x", "y"});
    for (int j = 0; j < 2; ++j) {
        const double mean = ds.rows.col(j).mean();
        const double absmax = ds.rows.col(j).cwiseAbs().maxCoeff();
        CHECK(std::abs(mean) <= 1e-9 * (absmax + 1.0));
    }
    CHECK(ds.center_vector[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(ds.center_vector[1] == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(ds.group_of_row == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("pixel mode divides by 255 before centering") {
    const std::string path =
        testutil::write_temp("pixel.csv", "p,g\n255,a\n0,b\n");
    const GroupedDataset ds = load_csv(path, "g", ScaleMode::pixel);
    // 255 -> 1.0 and 0 -> 0.0 first, then centering at 0.5.
    CHECK(ds.center_vector[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ds.rows(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ds.rows(1, 0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(ds.scale_record.mode == ScaleMode::pixel);
}

TEST_CASE("constant columns under unit-variance are flagged and left unscaled") {
    const std::string path = testutil::write_temp(
        "constcol.csv", "c,v,g\n5,0,a\n5,4,a\n5,0,b\n5,4,b\n");
    const GroupedDataset ds = load_csv(path, "g", ScaleMode::unit_variance);
    CHECK(ds.rows.col(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ds.scale_record.zero_variance_columns == std::vector<std::string>{"c"});
    CHECK(ds.scale_record.column_factors[0] == 1.0);
    // The varying column (0,4,...) has population std 2 after centering.
    CHECK(ds.scale_record.column_factors[1] == doctest::Approx(0.5).epsilon(1e-12));
    const double std1 = std::sqrt(ds.rows.col(1).squaredNorm() / ds.m());
    CHECK(std1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the group column may sit anywhere and is dropped from the matrix") {
    const std::string path = testutil::write_temp(
        "gfirst.csv", "g,x,y\na,1,2\nb,3,4\n");
    const GroupedDataset ds = load_csv(path, "g", ScaleMode::none);
    CHECK(ds.n() == 2);
    CHECK(ds.feature_columns == std::vector<std::string>{"x", "y"});
    CHECK(ds.group_column == "g");
}

TEST_CASE("a single group loads for PCA-only use") {
    const std::string path = testutil::write_temp("one.csv", "x,g\n1,a\n2,a\n");
    const GroupedDataset ds = load_csv(path, "g", ScaleMode::none);
    CHECK(ds.k() == 1);
}

TEST_CASE("load_csv reports bad cells with row and column") {
    const std::string path =
        testutil::write_temp("bad.csv", "x,y,g\n1,2,a\n3,oops,b\n");
    try {
        load_csv(path, "g", ScaleMode::none);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("y") != std::string::npos);
    }
}

TEST_CASE("load_csv rejects a missing group column and a missing file") {
    const std::string path = testutil::write_temp("nog.csv", "x,y\n1,2\n");
    CHECK_THROWS_AS(load_csv(path, "g", ScaleMode::none), DataError);
    CHECK_THROWS_AS(load_csv("/nonexistent/nope.csv", "g", ScaleMode::none), DataError);
}

TEST_CASE("load_csv rejects files with no data rows") {
    const std::string path = testutil::write_temp("empty.csv", "x,g\n");
    CHECK_THROWS_AS(load_csv(path, "g", ScaleMode::none), DataError);
}

TEST_CASE("scale_mode string round-trip and rejection") {
    CHECK(scale_mode_from_string("none") == ScaleMode::none);
    CHECK(scale_mode_from_string("pixel") == ScaleMode::pixel);
    CHECK(scale_mode_from_string("unit-variance") == ScaleMode::unit_variance);
    CHECK(to_string(ScaleMode::unit_variance) == "unit-variance");
    CHECK_THROWS_AS(scale_mode_from_string("zscore"), UsageError);
}

TEST_CASE("centering is idempotent") {
    std::mt19937_64 rng(31);
    const GroupedDataset ds = testutil::random_grouped(rng, 4, 2, 5, 9);
    const GroupedDataset again = testutil::dataset_from_rows(
        ds.rows, ds.group_of_row, ds.group_labels);
    CHECK((again.rows - ds.rows).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("enforce_width halves rows whose normalized gram peaks at 4") {
    Eigen::MatrixXd rows(2, 2);
    rows << 2, 0, -2, 0;  // gram diag(8,0), m=2 -> top eigenvalue 4
    const GroupedDataset ds = testutil::dataset_from_rows(rows, {0, 0}, {"a"});
    const GroupedDataset w = enforce_width(ds);
    CHECK(w.scale_record.width_factor == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w.scale_record.width_applied);
    CHECK(w.rows(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::MatrixXd G = gram(w.group_rows(0)) / w.group_size(0);
    CHECK(eig_sym(G).eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enforce_width is a no-op when every group is already within width") {
    const double a = std::sqrt(0.8);
    Eigen::MatrixXd rows(2, 2);
    rows << a, 0, -a, 0;  // top eigenvalue 0.8
    const GroupedDataset ds = testutil::dataset_from_rows(rows, {0, 0}, {"a"});
    const GroupedDataset w = enforce_width(ds);
    CHECK(w.scale_record.width_factor == 1.0);
    CHECK((w.rows - ds.rows).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("enforce_width takes the max over groups: eigenvalues {9,4} give s=1/3") {
    Eigen::MatrixXd rows(4, 2);
    rows << 3, 0, -3, 0, 0, 2, 0, -2;
    const GroupedDataset ds = testutil::dataset_from_rows(rows, {0, 0, 1, 1}, {"a", "b"});
    const GroupedDataset w = enforce_width(ds);
    CHECK(w.scale_record.width_factor == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    // Independent eigensolver confirms the spectral bound for every group.
    for (int g = 0; g < 2; ++g) {
        const Eigen::MatrixXd G = gram(w.group_rows(g)) / w.group_size(g);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(G);
        CHECK(ref.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
    }
}

TEST_CASE("enforce_width leaves all-zero data untouched") {
    const GroupedDataset ds =
        testutil::dataset_from_rows(Eigen::MatrixXd::Zero(3, 2), {0, 0, 1}, {"a", "b"});
    const GroupedDataset w = enforce_width(ds);
    CHECK(w.scale_record.width_factor == 1.0);
}
