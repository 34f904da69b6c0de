#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "fairpca/model.hpp"
#include "helpers.hpp"

namespace {

struct RunResult {
    int code = -1;
    std::string output;  // stdout + stderr interleaved
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(FAIRPCA_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    size_t got = 0;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) res.output.append(buf, got);
    const int status = pclose(pipe);
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                fields.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur += ch;
            }
        }
        fields.push_back(cur);
        rows.push_back(fields);
    }
    return rows;
}

std::string synth_cross() {
    const std::string path = testutil::temp_path("cli_cross.csv");
    const RunResult res = run_cli("synth --preset cross --seed 0 --out " + path);
    REQUIRE(res.code == 0);
    return path;
}

}  // namespace

TEST_CASE("synth cross writes exactly the eight fixture points") {
    const std::string path = synth_cross();
    const auto rows = parse_csv(testutil::read_file(path));
    REQUIRE(rows.size() == 9);
    CHECK(rows[0] == std::vector<std::string>{"x1", "x2", "g"});
    const std::vector<std::vector<std::string>> expected = {
        {"1", "0", "a"},  {"-1", "0", "a"}, {"2", "0", "a"}, {"-2", "0", "a"},
        {"0", "1", "b"},  {"0", "-1", "b"}, {"0", "2", "b"}, {"0", "-2", "b"}};
    for (size_t i = 0; i < expected.size(); ++i) CHECK(rows[i + 1] == expected[i]);
}

TEST_CASE("synth skew writes its six documented points") {
    const std::string path = testutil::temp_path("cli_skew.csv");
    REQUIRE(run_cli("synth --preset skew --seed 0 --out " + path).code == 0);
    const auto rows = parse_csv(testutil::read_file(path));
    REQUIRE(rows.size() == 7);
    CHECK(rows[1] == std::vector<std::string>{"1", "0", "a"});
    CHECK(rows[5] == std::vector<std::string>{"3", "0", "b"});
    CHECK(rows[6] == std::vector<std::string>{"-3", "0", "b"});
}

TEST_CASE("synth with a seed perturbs points by at most 1e-6") {
    const std::string path = testutil::temp_path("cli_cross_seeded.csv");
    REQUIRE(run_cli("synth --preset cross --seed 7 --out " + path).code == 0);
    const auto rows = parse_csv(testutil::read_file(path));
    REQUIRE(rows.size() == 9);
    const double fixture[8][2] = {{1, 0}, {-1, 0}, {2, 0}, {-2, 0},
                                  {0, 1}, {0, -1}, {0, 2}, {0, -2}};
    bool any_differs = false;
    for (size_t i = 0; i < 8; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double v = std::stod(rows[i + 1][static_cast<size_t>(j)]);
            CHECK(std::abs(v - fixture[i][j]) <= 1e-6);
            if (v != fixture[i][j]) any_differs = true;
        }
    }
    CHECK(any_differs);
}

TEST_CASE("synth rejects unknown presets with a usage exit") {
    CHECK(run_cli("synth --preset circle --seed 0 --out /tmp/unused.csv").code == 1);
}

TEST_CASE("fit on the cross reaches the analytic optimum and writes the model") {
    const std::string data = synth_cross();
    const std::string model_path = testutil::temp_path("cli_cross_model.json");
    const std::string trace_path = testutil::temp_path("cli_cross_trace.csv");
    const RunResult res = run_cli("fit --input " + data + " --group-col g --dims 1 --out " +
                                  model_path + " --trace " + trace_path);
    CHECK(res.code == 0);
    CHECK(res.output.find("objective=") != std::string::npos);

    const fairpca::ModelFile model = fairpca::load_model(model_path);
    CHECK(model.d == 1);
    CHECK(model.k == 2);
    CHECK(model.r() == 2);
    CHECK(std::abs(model.objective - 1.25) <= 1e-5);
    CHECK(model.converged);

    // Convergence trace: header plus one row per oracle call, final gap at
    // the 1e-5 target within 50 calls.
    const auto trace = parse_csv(testutil::read_file(trace_path));
    REQUIRE(trace.size() >= 2);
    CHECK(trace[0] == std::vector<std::string>{"iter", "upper", "lower", "gap"});
    CHECK(trace.size() - 1 <= 50);
    CHECK(std::stod(trace.back()[3]) <= 1e-5);
}

TEST_CASE("fit usage and data errors map to exits 1 and 2") {
    const std::string data = synth_cross();
    const std::string out = testutil::temp_path("unused_model.json");
    CHECK(run_cli("fit --input " + data + " --group-col g --dims 0 --out " + out).code == 1);
    CHECK(run_cli("fit --input /nonexistent.csv --group-col g --dims 1 --out " + out)
              .code == 2);
    CHECK(run_cli("fit --input " + data + " --group-col nope --dims 1 --out " + out).code ==
          2);
    CHECK(run_cli("frobnicate").code == 1);
    CHECK(run_cli("fit --input " + data + " --group-col g --dims 1 --iterate-mode wat "
                  "--out " + out)
              .code == 1);
}

TEST_CASE("fit flags non-convergence with exit 3 but still writes the model") {
    const std::string data = synth_cross();
    const std::string model_path = testutil::temp_path("cli_unconverged.json");
    const RunResult res = run_cli("fit --input " + data +
                                  " --group-col g --dims 1 --max-iters 1 --out " +
                                  model_path);
    CHECK(res.code == 3);
    const fairpca::ModelFile model = fairpca::load_model(model_path);
    CHECK_FALSE(model.converged);
}

TEST_CASE("transform embeds new rows with the stored preprocessing") {
    const std::string data = synth_cross();
    const std::string model_path = testutil::temp_path("cli_t_model.json");
    REQUIRE(run_cli("fit --input " + data + " --group-col g --dims 1 --out " + model_path)
                .code == 0);

    const std::string input =
        testutil::write_temp("to_embed.csv", "x1,x2\n1,0\n0,2\n");
    const std::string out = testutil::temp_path("embedded.csv");
    REQUIRE(run_cli("transform --model " + model_path + " --input " + input + " --out " +
                    out)
                .code == 0);
    const auto rows = parse_csv(testutil::read_file(out));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"u1", "u2"});
    const double expected = std::sqrt(1.0 - std::sqrt(0.5));
    CHECK(std::abs(std::stod(rows[1][0]) - expected) <= 1e-6);
    CHECK(std::abs(std::stod(rows[1][1])) <= 1e-6);
    CHECK(std::abs(std::stod(rows[2][1]) - 2.0 * expected) <= 1e-6);

    // A group column in the input is accepted and ignored.
    const std::string with_group =
        testutil::write_temp("to_embed_g.csv", "x1,x2,g\n1,0,whatever\n");
    const std::string out2 = testutil::temp_path("embedded2.csv");
    REQUIRE(run_cli("transform --model " + model_path + " --input " + with_group +
                    " --out " + out2)
                .code == 0);
    const auto rows2 = parse_csv(testutil::read_file(out2));
    REQUIRE(rows2.size() == 2);
    CHECK(rows2[1] == rows[1]);

    // Transform output is byte-stable across runs.
    const std::string out3 = testutil::temp_path("embedded3.csv");
    REQUIRE(run_cli("transform --model " + model_path + " --input " + input + " --out " +
                    out3)
                .code == 0);
    CHECK(testutil::read_file(out3) == testutil::read_file(out));
}

TEST_CASE("transform handles empty input and rejects mismatched columns") {
    const std::string data = synth_cross();
    const std::string model_path = testutil::temp_path("cli_t2_model.json");
    REQUIRE(run_cli("fit --input " + data + " --group-col g --dims 1 --out " + model_path)
                .code == 0);

    const std::string empty = testutil::write_temp("empty_in.csv", "x1,x2\n");
    const std::string out = testutil::temp_path("empty_out.csv");
    REQUIRE(run_cli("transform --model " + model_path + " --input " + empty + " --out " +
                    out)
                .code == 0);
    CHECK(testutil::read_file(out) == "u1,u2\n");

    const std::string wrong = testutil::write_temp("wrong_in.csv", "a,b\n1,2\n");
    CHECK(run_cli("transform --model " + model_path + " --input " + wrong + " --out " + out)
              .code == 2);
}

TEST_CASE("audit sweeps a dimension range with both methods") {
    const std::string data = synth_cross();
    const std::string out = testutil::temp_path("audit.csv");
    const RunResult res =
        run_cli("audit --input " + data + " --group-col g --dims 1..2 --out " + out);
    CHECK(res.code == 0);
    const auto rows = parse_csv(testutil::read_file(out));
    REQUIRE(rows.size() == 9);  // header + 2 dims x 2 methods x 2 groups
    CHECK(rows[0] == std::vector<std::string>{"method", "d", "group", "avg_error",
                                              "avg_loss"});
    // Fair d=1 rows carry the equal loss 1.25.
    int fair_d1 = 0;
    for (const auto& r : rows) {
        if (r[0] == "fair" && r[1] == "1") {
            CHECK(std::abs(std::stod(r[4]) - 1.25) <= 1e-5);
            ++fair_d1;
        }
        if (r[0] == "vanilla" && r[1] == "1" && r[2] == "b")
            CHECK(std::abs(std::stod(r[4]) - 2.5) <= 1e-9);
        if (r[1] == "2" && r[0] != "method") CHECK(std::abs(std::stod(r[3])) <= 1e-9);
    }
    CHECK(fair_d1 == 2);
}

TEST_CASE("audit supports single dims, vanilla-only runs, and rejects empty ranges") {
    const std::string data = synth_cross();
    const std::string out = testutil::temp_path("audit_v.csv");
    REQUIRE(run_cli("audit --input " + data +
                    " --group-col g --dims 2 --methods vanilla --out " + out)
                .code == 0);
    const auto rows = parse_csv(testutil::read_file(out));
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == "vanilla");
    CHECK(rows[2][0] == "vanilla");

    CHECK(run_cli("audit --input " + data + " --group-col g --dims 3..1 --out " + out)
              .code == 1);
    CHECK(run_cli("audit --input " + data +
                  " --group-col g --dims 1 --methods sideways --out " + out)
              .code == 1);
}

TEST_CASE("audit report matches the frozen golden file") {
    const std::string data = synth_cross();
    const std::string out = testutil::temp_path("audit_golden_run.csv");
    REQUIRE(run_cli("audit --input " + data +
                    " --group-col g --dims 1..2 --no-width-norm --out " + out)
                .code == 0);
    const std::string golden =
        testutil::read_file(std::string(FAIRPCA_TEST_DATA_DIR) + "/cross_audit_golden.csv");
    REQUIRE(!golden.empty());
    CHECK(testutil::read_file(out) == golden);
}
