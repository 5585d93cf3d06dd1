#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "helpers.hpp"
#include "utilrank/io.hpp"
#include "utilrank/roc.hpp"

using namespace utilrank;
using json = nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

fs::path scratch_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() /
                 ("utilrank_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CliResult run_cli(const std::string& args) {
    const fs::path out_file = scratch_dir() / "stdout.txt";
    const fs::path err_file = scratch_dir() / "stderr.txt";
    const std::string command = std::string(UTILRANK_CLI_PATH) + " " + args + " > " +
                                out_file.string() + " 2> " + err_file.string();
    const int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_text_file(out_file.string());
    result.err = read_text_file(err_file.string());
    return result;
}

std::string write_file(const std::string& name, const std::string& contents) {
    const fs::path path = scratch_dir() / name;
    write_text_file(path.string(), contents);
    return path.string();
}

// Prediction rows realizing the given counts, header included.
std::string predictions_csv(int n00, int n01, int n10, int n11) {
    std::string s = "true_label,predicted_label\n";
    for (int i = 0; i < n00; ++i) s += "0,0\n";
    for (int i = 0; i < n01; ++i) s += "1,0\n";
    for (int i = 0; i < n10; ++i) s += "0,1\n";
    for (int i = 0; i < n11; ++i) s += "1,1\n";
    return s;
}

// Scores whose threshold sweep walks exactly through the given polyline:
// one tied score group per segment.
std::string scores_csv_for_polyline(const std::vector<RocPoint>& vertices, int positives,
                                    int negatives) {
    std::string s = "true_label,score\n";
    double score = 1.0;
    for (std::size_t k = 1; k < vertices.size(); ++k) {
        const int pos = static_cast<int>(
            std::lround((vertices[k].t - vertices[k - 1].t) * positives));
        const int neg = static_cast<int>(
            std::lround((vertices[k].f - vertices[k - 1].f) * negatives));
        for (int i = 0; i < pos; ++i) s += "0," + std::to_string(score) + "\n";
        for (int i = 0; i < neg; ++i) s += "1," + std::to_string(score) + "\n";
        score -= 0.01;
    }
    return s;
}

const char* factory_config_json = R"({
  "schema_version": 1,
  "utilities": [[15, -335], [-35, 165]]
})";

const char* alternative_config_json = R"({
  "utilities": [[45, -335], [-65, 165]]
})";

const char* identity_config_json = R"({
  "utilities": [[1, 0], [0, 1]]
})";

const char* mixture_config_json = R"({
  "mixture": [
    {"weight": 0.5, "utilities": [[15, -335], [-35, 165]]},
    {"weight": 0.5, "utilities": [[45, -335], [-65, 165]]}
  ]
})";

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("evaluate reproduces the worked example and round-trips the matrix") {
    const auto predictions = write_file("a.csv", predictions_csv(27, 15, 23, 35));
    const auto config = write_file("factory.json", factory_config_json);

    const auto result =
        run_cli("evaluate " + predictions + " --utilities " + config + " --format json");
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    CHECK(j["schema_version"] == 1);
    CHECK(std::abs(j["utility_yield"].get<double>() - 3.5) < 1e-9);
    // Exact round trip of the normalized counts.
    CHECK(j["confusion_matrix"]["c00"].get<double>() == 27.0 / 100.0);
    CHECK(j["confusion_matrix"]["c01"].get<double>() == 15.0 / 100.0);
    CHECK(j["confusion_matrix"]["c10"].get<double>() == 23.0 / 100.0);
    CHECK(j["confusion_matrix"]["c11"].get<double>() == 35.0 / 100.0);
    CHECK(j["confusion_matrix"]["n"] == 100);
    CHECK(std::abs(j["metrics"]["accuracy"].get<double>() - 0.62) < 1e-9);
    CHECK(std::abs(j["metrics"]["f1"].get<double>() - 0.59) < 0.005);
    CHECK(std::abs(j["metrics"]["mcc"].get<double>() - 0.24) < 0.005);
}

TEST_CASE("evaluate with identity utilities reports the accuracy as yield") {
    const auto predictions = write_file("a.csv", predictions_csv(27, 15, 23, 35));
    const auto config = write_file("identity.json", identity_config_json);
    const auto result =
        run_cli("evaluate " + predictions + " --utilities " + config + " --format json");
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    CHECK(j["utility_yield"].get<double>() == j["metrics"]["accuracy"].get<double>());
}

TEST_CASE("evaluate with a mixture config averages the matrices") {
    const auto predictions = write_file("a.csv", predictions_csv(27, 15, 23, 35));
    const auto config = write_file("mixture.json", mixture_config_json);
    const auto result =
        run_cli("evaluate " + predictions + " --utilities " + config + " --format json");
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    // Mean of the 3.5 and 4.7 yields, by linearity.
    CHECK(std::abs(j["utility_yield"].get<double>() - 4.1) < 1e-9);
}

TEST_CASE("rank orders by yield and flags disagreeing metrics") {
    const auto a = write_file("a.csv", predictions_csv(27, 15, 23, 35));
    const auto b = write_file("b.csv", predictions_csv(43, 18, 7, 32));
    const auto factory = write_file("factory.json", factory_config_json);
    const auto alternative = write_file("alternative.json", alternative_config_json);

    auto result = run_cli("rank " + a + " " + b + " --utilities " + factory + " --format json");
    REQUIRE(result.exit_code == 0);
    json j = json::parse(result.out);
    CHECK(j["ranking"][0]["input"] == a);
    CHECK(j["ranking"][1]["input"] == b);
    // Most of the table prefers the losing classifier here.
    const auto disagreeing =
        j["metrics_disagreeing_with_yield_order"].get<std::vector<std::string>>();
    CHECK(disagreeing.size() >= 5);

    result = run_cli("rank " + a + " " + b + " --utilities " + alternative + " --format json");
    REQUIRE(result.exit_code == 0);
    j = json::parse(result.out);
    CHECK(j["ranking"][0]["input"] == b);
    CHECK(j["ranking"][1]["input"] == a);

    // Single input: trivial ranking.
    result = run_cli("rank " + a + " --utilities " + factory);
    CHECK(result.exit_code == 0);
}

TEST_CASE("rank warns when class frequencies differ") {
    const auto a = write_file("a.csv", predictions_csv(27, 15, 23, 35));
    const auto skew = write_file("skew.csv", predictions_csv(70, 5, 10, 15));
    const auto factory = write_file("factory.json", factory_config_json);
    const auto result = run_cli("rank " + a + " " + skew + " --utilities " + factory);
    CHECK(result.exit_code == 0);
    CHECK(result.err.find("class frequencies differ") != std::string::npos);
}

TEST_CASE("input errors exit with code 2") {
    const auto factory = write_file("factory.json", factory_config_json);
    CHECK(run_cli("evaluate /no/such/file.csv --utilities " + factory).exit_code == 2);

    const auto bad_label = write_file("bad.csv", "true_label,predicted_label\n0,2\n");
    const auto bad = run_cli("evaluate " + bad_label + " --utilities " + factory);
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find(":2:") != std::string::npos); // line number in the diagnostic

    const auto no_header = write_file("nohdr.csv", "0,1\n1,1\n");
    CHECK(run_cli("evaluate " + no_header + " --utilities " + factory).exit_code == 2);

    CHECK(run_cli("no_such_command").exit_code == 2);
}

TEST_CASE("config errors exit with code 3") {
    const auto predictions = write_file("a.csv", predictions_csv(27, 15, 23, 35));
    const auto invalid_json = write_file("broken.json", "{ not json");
    CHECK(run_cli("evaluate " + predictions + " --utilities " + invalid_json).exit_code == 3);

    const auto empty = write_file("empty.json", "{}");
    CHECK(run_cli("evaluate " + predictions + " --utilities " + empty).exit_code == 3);

    const auto infeasible =
        write_file("infeasible.json", R"({"utilities": [[0, 1], [1, 0]]})");
    CHECK(run_cli("evaluate " + predictions + " --utilities " + infeasible).exit_code == 3);

    CHECK(run_cli("compliance no_such_metric --samples 200").exit_code == 3);

    const auto config = write_file("factory.json", factory_config_json);
    CHECK(run_cli("simulate --utilities " + config + " --sigma 0.9 --pairs 10000")
              .exit_code == 3);
}

TEST_CASE("simulate writes byte-identical reports for any worker count") {
    const fs::path dir1 = scratch_dir() / "sim1";
    const fs::path dir2 = scratch_dir() / "sim2";
    const std::string common =
        "simulate --pairs 20000 --seed 777 --sigma 0,0.1 --format csv";
    const auto one = run_cli(common + " --threads 1 --out " + dir1.string());
    const auto two = run_cli(common + " --threads 2 --out " + dir2.string());
    REQUIRE(one.exit_code == 0);
    REQUIRE(two.exit_code == 0);
    CHECK(one.out == two.out);
    CHECK(read_text_file((dir1 / "simulate_report.csv").string()) ==
          read_text_file((dir2 / "simulate_report.csv").string()));
    CHECK(read_text_file((dir1 / "simulate_report.json").string()) ==
          read_text_file((dir2 / "simulate_report.json").string()));
    // Structure: a row per metric plus one per sigma.
    const json j = json::parse(read_text_file((dir1 / "simulate_report.json").string()));
    CHECK(j["metrics"].size() == 8);
    CHECK(j["noisy_utility"].size() == 2);
    CHECK(j["noisy_utility"][0]["fraction"].get<double>() == 0.0);
}

TEST_CASE("seed comes from the environment when no flag is given") {
    const fs::path by_flag = scratch_dir() / "seed_flag";
    const fs::path by_env = scratch_dir() / "seed_env";
    const std::string tail = " simulate --pairs 10000 --sigma 0 --format csv --out ";
    const std::string flag_cmd = std::string(UTILRANK_CLI_PATH) + tail + by_flag.string() +
                                 " --seed 0x2a > /dev/null 2>&1";
    const std::string env_cmd = "UTILRANK_SEED=42 " + std::string(UTILRANK_CLI_PATH) + tail +
                                by_env.string() + " > /dev/null 2>&1";
    REQUIRE(std::system(flag_cmd.c_str()) == 0);
    REQUIRE(std::system(env_cmd.c_str()) == 0);
    CHECK(read_text_file((by_flag / "simulate_report.csv").string()) ==
          read_text_file((by_env / "simulate_report.csv").string()));
}

TEST_CASE("compliance prints verdicts and writes witnesses") {
    const fs::path dir = scratch_dir() / "comp";
    const auto result = run_cli("compliance accuracy precision --samples 300 --seed 5 "
                                "--witness --out " +
                                dir.string() + " --format json");
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    CHECK(j["results"][0]["metric"] == "accuracy");
    CHECK(j["results"][0]["compliant"] == true);
    CHECK(j["results"][1]["metric"] == "precision");
    CHECK(j["results"][1]["compliant"] == false);
    CHECK(j["results"][1].contains("witness"));
    const auto csv = read_text_file((dir / "compliance_witnesses.csv").string());
    CHECK(csv.find("precision") != std::string::npos);
}

TEST_CASE("roc reports the operating point and flags the AUC reversal") {
    const OperatingContext ctx(UtilityMatrix(4, 0, 0, 1), 0.5);
    const auto pair = find_auc_reversal_pair(ctx);
    REQUIRE(pair.has_value());
    const auto steep_scores =
        write_file("steep.csv", scores_csv_for_polyline(pair->first.points(), 5000, 2000));
    const auto smooth_scores =
        write_file("smooth.csv", scores_csv_for_polyline(pair->second.points(), 5000, 2000));
    const auto config = write_file("roc_util.json",
                                   R"({"utilities": [[4, 0], [0, 1]], "balance": 0.5})");

    const auto result = run_cli("roc " + steep_scores + " " + smooth_scores +
                                " --utilities " + config + " --format json");
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    CHECK(j["slope"].get<double>() == 0.25);
    CHECK(j["curves"][0]["auc"].get<double>() < j["curves"][1]["auc"].get<double>());
    CHECK(j["tangent_ranking"][0] == 0);
    CHECK(j["auc_ranking"][0] == 1);
    CHECK(j["auc_ranking_disagrees"] == true);

    const auto text = run_cli("roc " + steep_scores + " " + smooth_scores + " --utilities " +
                              config);
    CHECK(text.out.find("AUC ordering disagrees") != std::string::npos);
}

TEST_CASE("roc on perfect scores finds the perfect corner") {
    std::string rows = "true_label,score\n";
    for (int i = 0; i < 10; ++i) rows += "0,0.9\n";
    for (int i = 0; i < 10; ++i) rows += "1,0.1\n";
    const auto scores = write_file("perfect.csv", rows);
    const auto config = write_file("identity.json", identity_config_json);
    const auto result = run_cli("roc " + scores + " --utilities " + config +
                                " --balance 0.5 --format json");
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    CHECK(j["curves"][0]["optimal"]["f"].get<double>() == 0.0);
    CHECK(j["curves"][0]["optimal"]["t"].get<double>() == 1.0);
    CHECK(j["curves"][0]["optimal"]["utility_yield"].get<double>() == 1.0);
    CHECK(j["curves"][0]["optimal"]["threshold"].get<double>() == 0.9);
}

TEST_CASE("roc rejects single-class data with exit code 2") {
    const auto scores = write_file("oneclass.csv", "true_label,score\n0,0.9\n0,0.8\n");
    const auto config = write_file("identity.json", identity_config_json);
    CHECK(run_cli("roc " + scores + " --utilities " + config + " --balance 0.5").exit_code ==
          2);
}

TEST_CASE("roc requires a balance from flag or config") {
    const auto scores = write_file("s.csv", "true_label,score\n0,0.9\n1,0.1\n");
    const auto config = write_file("identity.json", identity_config_json);
    CHECK(run_cli("roc " + scores + " --utilities " + config).exit_code == 3);
}

TEST_CASE("scatter writes CSV and SVG") {
    const fs::path dir = scratch_dir() / "scatter";
    const auto config = write_file("identity.json", identity_config_json);
    const auto result = run_cli("scatter --utilities " + config +
                                " --metric f1 --balance 0.5 -n 200 --seed 3 --svg --out " +
                                dir.string());
    REQUIRE(result.exit_code == 0);
    const auto csv = read_text_file((dir / "scatter_f1.csv").string());
    CHECK(csv.rfind("yield,score,pair_id,reversed_flag\n", 0) == 0);
    const auto svg = read_text_file((dir / "scatter_f1.svg").string());
    CHECK(svg.find("<svg") != std::string::npos);
}

TEST_SUITE_END();
