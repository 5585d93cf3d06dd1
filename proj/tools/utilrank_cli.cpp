// Command-line surface: evaluate, rank, simulate, compliance, roc, scatter.
//
// Exit codes: 0 success, 2 input error (unreadable or malformed data files,
// bad command line), 3 configuration error (utility config, parameters).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "utilrank/compliance.hpp"
#include "utilrank/core.hpp"
#include "utilrank/io.hpp"
#include "utilrank/metrics.hpp"
#include "utilrank/montecarlo.hpp"
#include "utilrank/roc.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using json = nlohmann::json;
using namespace utilrank;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input_error = 2;
constexpr int exit_config_error = 3;

json matrix_json(const UtilityMatrix& u) {
    return json::array({json::array({u.u00(), u.u01()}), json::array({u.u10(), u.u11()})});
}

json confusion_json(const ConfusionMatrix& c) {
    json j;
    j["c00"] = c.c00();
    j["c01"] = c.c01();
    j["c10"] = c.c10();
    j["c11"] = c.c11();
    j["f0"] = c.f0();
    j["f1"] = c.f1();
    if (c.total()) j["n"] = *c.total();
    return j;
}

void print_confusion(const ConfusionMatrix& c) {
    std::printf("confusion matrix (rows: predicted, columns: true; class 0 first):\n");
    std::printf("  [%9.6f  %9.6f]\n", c.c00(), c.c01());
    std::printf("  [%9.6f  %9.6f]\n", c.c10(), c.c11());
    std::printf("class frequencies: f0 = %.6f, f1 = %.6f", c.f0(), c.f1());
    if (c.total()) std::printf("   (N = %llu)", static_cast<unsigned long long>(*c.total()));
    std::printf("\n");
}

// Metric value or NaN when the metric is undefined on this test set.
double metric_or_nan(const MetricDescriptor& metric, const ConfusionMatrix& c) {
    try {
        return metric.score(c);
    } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

UtilityConfig load_config(const std::string& path) {
    if (path.empty()) throw ConfigError("--utilities <config.json> is required");
    return read_utility_config(path);
}

std::uint64_t pick_seed(const std::optional<std::uint64_t>& flag,
                        const UtilityConfig* config) {
    if (flag) return *flag;
    if (config && config->seed) return *config->seed;
    if (const char* env = std::getenv("UTILRANK_SEED")) {
        return std::stoull(env, nullptr, 0); // accepts decimal or 0x-hex
    }
    return default_experiment_seed;
}

std::string pick_out_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("UTILRANK_OUT")) return env;
    return ".";
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + dir);
}

struct EvaluatedInput {
    std::string path;
    ConfusionMatrix confusion;
    double yield;
};

int cmd_evaluate(const std::string& predictions_path, const std::string& config_path,
                 const std::string& format, const std::string& out_dir) {
    const UtilityConfig config = load_config(config_path);
    const UtilityMatrix utilities = config.effective_utilities();
    const ConfusionMatrix confusion =
        confusion_from_predictions(read_predictions_csv(predictions_path));
    const double yield = utility_yield(utilities, confusion);

    json j;
    j["schema_version"] = 1;
    j["kind"] = "evaluate_report";
    j["input"] = predictions_path;
    j["utilities"] = matrix_json(utilities);
    j["confusion_matrix"] = confusion_json(confusion);
    j["utility_yield"] = yield;
    j["metrics"] = json::object();
    for (const auto& metric : metric_registry()) {
        const double value = metric_or_nan(metric, confusion);
        j["metrics"][metric.name] = std::isnan(value) ? json() : json(value);
    }

    if (format == "json") {
        std::cout << j.dump(2) << "\n";
    } else if (format == "csv") {
        std::string csv = "name,value\n";
        csv += "utility_yield," + format_full(yield) + "\n";
        for (const auto& metric : metric_registry()) {
            const double value = metric_or_nan(metric, confusion);
            csv += metric.name + "," + (std::isnan(value) ? "" : format_full(value)) + "\n";
        }
        std::cout << csv;
    } else {
        print_confusion(confusion);
        std::printf("utility yield: %.10g\n", yield);
        std::printf("metrics:\n");
        for (const auto& metric : metric_registry()) {
            const double value = metric_or_nan(metric, confusion);
            if (std::isnan(value)) {
                std::printf("  %-18s undefined\n", metric.name.c_str());
            } else {
                std::printf("  %-18s %.6f\n", metric.name.c_str(), value);
            }
        }
    }
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        write_text_file(out_dir + "/evaluate_report.json", j.dump(2) + "\n");
    }
    return exit_ok;
}

int cmd_rank(const std::vector<std::string>& paths, const std::string& config_path,
             const std::string& format) {
    const UtilityConfig config = load_config(config_path);
    const UtilityMatrix utilities = config.effective_utilities();

    std::vector<EvaluatedInput> inputs;
    for (const auto& path : paths) {
        const ConfusionMatrix c = confusion_from_predictions(read_predictions_csv(path));
        inputs.push_back({path, c, utility_yield(utilities, c)});
    }

    for (std::size_t i = 1; i < inputs.size(); ++i) {
        if (std::abs(inputs[i].confusion.f0() - inputs[0].confusion.f0()) > 1e-9) {
            std::fprintf(stderr,
                         "warning: class frequencies differ across inputs; metric "
                         "comparisons assume a common test set\n");
            break;
        }
    }

    std::vector<std::size_t> order(inputs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return inputs[a].yield > inputs[b].yield;
    });

    // A metric disagrees when it strictly reverses some pair of the ranking.
    std::vector<std::string> disagreeing;
    for (const auto& metric : metric_registry()) {
        bool reversed = false;
        for (std::size_t i = 0; i < order.size() && !reversed; ++i) {
            for (std::size_t k = i + 1; k < order.size() && !reversed; ++k) {
                const double yield_diff = inputs[order[i]].yield - inputs[order[k]].yield;
                const double score_diff = metric_or_nan(metric, inputs[order[i]].confusion) -
                                          metric_or_nan(metric, inputs[order[k]].confusion);
                if (std::isnan(score_diff)) continue;
                if (std::abs(yield_diff) > 1e-12 && std::abs(score_diff) > 1e-12 &&
                    (yield_diff > 0) != (score_diff > 0)) {
                    reversed = true;
                }
            }
        }
        if (reversed) disagreeing.push_back(metric.name);
    }

    if (format == "json") {
        json j;
        j["schema_version"] = 1;
        j["kind"] = "rank_report";
        j["utilities"] = matrix_json(utilities);
        j["ranking"] = json::array();
        for (std::size_t idx : order) {
            json row;
            row["input"] = inputs[idx].path;
            row["utility_yield"] = inputs[idx].yield;
            row["confusion_matrix"] = confusion_json(inputs[idx].confusion);
            row["metrics"] = json::object();
            for (const auto& metric : metric_registry()) {
                const double value = metric_or_nan(metric, inputs[idx].confusion);
                row["metrics"][metric.name] = std::isnan(value) ? json() : json(value);
            }
            j["ranking"].push_back(row);
        }
        j["metrics_disagreeing_with_yield_order"] = disagreeing;
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("%-4s %-32s %s\n", "rank", "input", "utility yield");
        for (std::size_t i = 0; i < order.size(); ++i) {
            std::printf("%-4zu %-32s %.10g\n", i + 1, inputs[order[i]].path.c_str(),
                        inputs[order[i]].yield);
        }
        if (!disagreeing.empty()) {
            std::printf("metrics disagreeing with the yield order:");
            for (const auto& name : disagreeing) std::printf(" %s", name.c_str());
            std::printf("\n");
        }
    }
    return exit_ok;
}

int cmd_simulate(const std::string& config_path, const std::string& prior_flag,
                 const std::vector<double>& sigma_flag,
                 std::optional<std::uint64_t> pairs_flag,
                 std::optional<std::uint64_t> seed_flag, int threads,
                 const std::string& out_flag, const std::string& format) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
    std::optional<UtilityConfig> config;
    if (!config_path.empty()) config = read_utility_config(config_path);

    ExperimentConfig experiment;
    if (config) {
        if (config->prior) experiment.prior = *config->prior;
        if (config->sigmas) experiment.sigmas = *config->sigmas;
        if (config->pairs) experiment.pairs = *config->pairs;
        if (config->metrics) experiment.metrics = *config->metrics;
    }
    if (!prior_flag.empty()) experiment.prior = prior_from_string(prior_flag);
    if (!sigma_flag.empty()) experiment.sigmas = sigma_flag;
    if (pairs_flag) experiment.pairs = *pairs_flag;
    experiment.seed = pick_seed(seed_flag, config ? &*config : nullptr);
    try {
        experiment.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const SweepResult sweep = sweep_error_levels(experiment, experiment.sigmas);
    const ExperimentReport& report = sweep.report;

    const std::string out_dir = pick_out_dir(out_flag);
    ensure_dir(out_dir);
    const std::string json_path = out_dir + "/simulate_report.json";
    const std::string csv_path = out_dir + "/simulate_report.csv";
    write_text_file(json_path, experiment_report_json(report, sweep.linear_fit_r2));
    write_text_file(csv_path, experiment_report_csv(report));

    if (format == "json") {
        std::cout << experiment_report_json(report, sweep.linear_fit_r2);
    } else if (format == "csv") {
        std::cout << experiment_report_csv(report);
    } else {
        std::printf("pairwise misranking experiment: %llu pairs, %s prior, seed %llu\n",
                    static_cast<unsigned long long>(report.pairs),
                    prior_to_string(report.prior).c_str(),
                    static_cast<unsigned long long>(report.seed));
        std::printf("%-20s %-10s %s\n", "evaluator", "misranked", "fraction");
        for (const auto& estimate : report.metric_estimates) {
            std::printf("%-20s %-10llu %.4f%% (se %.4f%%)\n", estimate.evaluator.c_str(),
                        static_cast<unsigned long long>(estimate.misranked),
                        100.0 * estimate.fraction, 100.0 * estimate.std_error);
        }
        for (std::size_t k = 0; k < report.sigmas.size(); ++k) {
            const auto& estimate = report.sigma_estimates[k];
            char label[32];
            std::snprintf(label, sizeof(label), "utility sigma=%.3g", report.sigmas[k]);
            std::printf("%-20s %-10llu %.4f%% (se %.4f%%)\n", label,
                        static_cast<unsigned long long>(estimate.misranked),
                        100.0 * estimate.fraction, 100.0 * estimate.std_error);
        }
        std::printf("linear fit R^2 of fraction vs sigma: %.4f\n", sweep.linear_fit_r2);
        std::printf("reports written to %s and %s\n", json_path.c_str(), csv_path.c_str());
    }
    return exit_ok;
}

int cmd_compliance(std::vector<std::string> names, std::size_t samples,
                   std::optional<std::uint64_t> seed_flag,
                   std::vector<double> frequencies, bool witness,
                   const std::string& out_flag, const std::string& format) {
    if (names.empty()) names = metric_names();
    if (frequencies.empty()) frequencies = default_frequency_grid();
    const std::uint64_t seed = pick_seed(seed_flag, nullptr);

    std::vector<ComplianceReport> reports;
    for (const auto& name : names) {
        const MetricDescriptor* metric = find_metric(name);
        if (metric == nullptr) {
            std::string known;
            for (const auto& m : metric_names()) known += " " + m;
            throw ConfigError("unknown metric '" + name + "'; registry:" + known);
        }
        reports.push_back(compliance_verdict(*metric, frequencies, samples, seed));
    }

    if (format == "json") {
        std::cout << compliance_reports_json(reports);
    } else {
        std::printf("%-20s %-14s %s\n", "metric", "verdict", "direction (X, Y)");
        for (const auto& report : reports) {
            if (report.compliant) {
                std::printf("%-20s %-14s (%g, %g) at %.4f deg\n", report.metric.c_str(),
                            "compliant", report.direction_xy->first,
                            report.direction_xy->second, *report.direction_deg);
            } else {
                std::printf("%-20s %-14s %s\n", report.metric.c_str(), "non-compliant",
                            report.witness ? "misranked pair found" : "");
            }
        }
    }
    if (witness) {
        const std::string out_dir = pick_out_dir(out_flag);
        ensure_dir(out_dir);
        const std::string path = out_dir + "/compliance_witnesses.csv";
        write_text_file(path, witness_csv(reports));
        std::fprintf(stderr, "witness pairs written to %s\n", path.c_str());
    }
    return exit_ok;
}

int cmd_roc(const std::vector<std::string>& paths, const std::string& config_path,
            std::optional<double> balance_flag, const std::string& format,
            const std::string& out_flag) {
    const UtilityConfig config = load_config(config_path);
    const UtilityMatrix utilities = config.effective_utilities();
    std::optional<double> balance = balance_flag ? balance_flag : config.balance;
    if (!balance) {
        throw ConfigError("class balance required: pass --balance or set 'balance' in the "
                          "utility config");
    }
    const OperatingContext ctx(utilities, *balance);

    std::vector<RocCurve> curves;
    for (const auto& path : paths) {
        const LabeledScores data = read_scores_csv(path);
        try {
            curves.push_back(curve_from_scores(data.true_labels, data.scores));
        } catch (const std::invalid_argument& e) {
            throw ParseError(path + ": " + e.what());
        }
    }

    json j;
    j["schema_version"] = 1;
    j["kind"] = "roc_report";
    j["utilities"] = matrix_json(utilities);
    j["balance"] = *balance;
    j["slope"] = std::isinf(ctx.slope()) ? json() : json(ctx.slope());
    j["curves"] = json::array();

    for (std::size_t i = 0; i < curves.size(); ++i) {
        const OperatingPoint op = optimal_operating_point(curves[i], ctx);
        json row;
        row["input"] = paths[i];
        row["auc"] = auc(curves[i]);
        row["optimal"] = {{"f", op.f},
                          {"t", op.t},
                          {"vertex", op.vertex},
                          {"utility_yield", op.yield}};
        const double threshold = curves[i].thresholds()[op.vertex];
        row["optimal"]["threshold"] = std::isinf(threshold) ? json() : json(threshold);
        j["curves"].push_back(row);
    }

    bool auc_disagrees = false;
    if (curves.size() >= 2) {
        const TangentRanking ranking = compare_by_tangent(curves, ctx);
        std::vector<std::size_t> by_auc(curves.size());
        for (std::size_t i = 0; i < by_auc.size(); ++i) by_auc[i] = i;
        std::stable_sort(by_auc.begin(), by_auc.end(), [&](std::size_t a, std::size_t b) {
            return auc(curves[a]) > auc(curves[b]);
        });
        auc_disagrees = by_auc != ranking.order;
        j["tangent_ranking"] = ranking.order;
        j["tangent_intercepts"] = ranking.intercepts;
        j["auc_ranking"] = by_auc;
        j["auc_ranking_disagrees"] = auc_disagrees;
    }

    if (format == "json") {
        std::cout << j.dump(2) << "\n";
    } else {
        for (std::size_t i = 0; i < curves.size(); ++i) {
            const auto& row = j["curves"][i];
            const auto& op = row["optimal"];
            std::printf("%s: AUC %.6f, optimal f* = %.6f, t* = %.6f, yield %.10g",
                        paths[i].c_str(), row["auc"].get<double>(), op["f"].get<double>(),
                        op["t"].get<double>(), op["utility_yield"].get<double>());
            if (!op["threshold"].is_null()) {
                std::printf(", threshold %.6g", op["threshold"].get<double>());
            }
            std::printf("\n");
        }
        if (curves.size() >= 2) {
            std::printf("ranking by tangent intercept (best first):");
            for (std::size_t idx : j["tangent_ranking"].get<std::vector<std::size_t>>()) {
                std::printf(" %s", paths[idx].c_str());
            }
            std::printf("\n");
            if (auc_disagrees) {
                std::printf("warning: AUC ordering disagrees with the utility ranking; "
                            "the tangent criterion decides\n");
            }
        }
    }
    if (!out_flag.empty()) {
        ensure_dir(out_flag);
        write_text_file(out_flag + "/roc_report.json", j.dump(2) + "\n");
    }
    return exit_ok;
}

int cmd_scatter(const std::string& config_path, const std::string& metric_name,
                double f0, std::size_t n, std::optional<std::uint64_t> seed_flag,
                const std::string& out_flag, bool svg) {
    const UtilityConfig config = load_config(config_path);
    const UtilityMatrix utilities = config.effective_utilities();
    const MetricDescriptor* metric = find_metric(metric_name);
    if (metric == nullptr) {
        throw ConfigError("unknown metric '" + metric_name + "'");
    }
    if (!(f0 > 0.0 && f0 < 1.0)) {
        throw ConfigError("--balance must lie strictly between 0 and 1");
    }
    const std::uint64_t seed = pick_seed(seed_flag, &config);
    const auto points = scatter_dataset(utilities, *metric, f0, n, seed);

    const std::string out_dir = pick_out_dir(out_flag);
    ensure_dir(out_dir);
    const std::string csv_path = out_dir + "/scatter_" + metric_name + ".csv";
    write_text_file(csv_path, scatter_csv(points));
    std::printf("scatter dataset written to %s (%zu rows)\n", csv_path.c_str(),
                points.size());
    if (svg) {
        const std::string svg_path = out_dir + "/scatter_" + metric_name + ".svg";
        write_text_file(svg_path, scatter_svg(points, "utility yield", metric_name));
        std::printf("rendering written to %s\n", svg_path.c_str());
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decision-theoretic evaluation and ranking of binary classifiers"};
    app.require_subcommand(1);

    std::string predictions_path, config_path, format = "text", out_dir;
    std::vector<std::string> rank_paths, score_paths, metric_arg;
    std::vector<double> sigma_flag, frequency_flag;
    std::optional<std::uint64_t> seed_flag, pairs_flag;
    std::optional<double> balance_flag;
    std::string prior_flag, scatter_metric;
    std::size_t samples = default_compliance_samples;
    std::size_t scatter_n = 2000;
    int threads = 0;
    bool witness = false, svg = false;

    auto* evaluate = app.add_subcommand("evaluate", "Score one predictions file");
    evaluate->add_option("predictions", predictions_path, "CSV of true_label,predicted_label")
        ->required();
    evaluate->add_option("--utilities", config_path, "utility config JSON")->required();
    evaluate->add_option("--format", format)->check(CLI::IsMember({"text", "json", "csv"}));
    evaluate->add_option("--out", out_dir, "directory for the JSON report");

    auto* rank = app.add_subcommand("rank", "Order several predictions files by yield");
    rank->add_option("predictions", rank_paths)->required()->expected(-1);
    rank->add_option("--utilities", config_path)->required();
    rank->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo misranking experiment");
    simulate->add_option("--utilities", config_path, "config with an 'experiment' section");
    simulate->add_option("--prior", prior_flag)->check(CLI::IsMember({"uniform", "gaussian"}));
    simulate->add_option("--sigma", sigma_flag, "error standard deviations")->delimiter(',');
    simulate->add_option("--pairs", pairs_flag, "pairs per estimate");
    simulate->add_option("--seed", seed_flag);
    simulate->add_option("--threads", threads, "worker threads (0 = library default)");
    simulate->add_option("--out", out_dir, "report directory");
    simulate->add_option("--format", format)->check(CLI::IsMember({"text", "json", "csv"}));

    auto* compliance = app.add_subcommand("compliance", "Decision-theory compliance verdicts");
    compliance->add_option("metrics", metric_arg, "metric names (default: all)");
    compliance->add_option("--samples", samples, "pairs per frequency");
    compliance->add_option("--seed", seed_flag);
    compliance->add_option("--frequencies", frequency_flag)->delimiter(',');
    compliance->add_flag("--witness", witness, "write misranked-pair CSV");
    compliance->add_option("--out", out_dir);
    compliance->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    auto* roc = app.add_subcommand("roc", "Operating points and curve comparison");
    roc->add_option("scores", score_paths, "CSV of true_label,score")->required()->expected(-1);
    roc->add_option("--utilities", config_path)->required();
    roc->add_option("--balance", balance_flag, "class-0 proportion B of the test set");
    roc->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
    roc->add_option("--out", out_dir);

    auto* scatter = app.add_subcommand("scatter", "Yield-vs-metric scatter dataset");
    scatter->add_option("--utilities", config_path)->required();
    scatter->add_option("--metric", scatter_metric)->required();
    scatter->add_option("--balance", balance_flag, "class fraction f0 (default 0.5)");
    scatter->add_option("-n,--samples", scatter_n);
    scatter->add_option("--seed", seed_flag);
    scatter->add_option("--out", out_dir);
    scatter->add_flag("--svg", svg, "also write an SVG rendering");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input_error;
    }

    try {
        if (app.got_subcommand(evaluate)) {
            return cmd_evaluate(predictions_path, config_path, format, out_dir);
        }
        if (app.got_subcommand(rank)) {
            return cmd_rank(rank_paths, config_path, format);
        }
        if (app.got_subcommand(simulate)) {
            return cmd_simulate(config_path, prior_flag, sigma_flag, pairs_flag, seed_flag,
                                threads, out_dir, format);
        }
        if (app.got_subcommand(compliance)) {
            return cmd_compliance(metric_arg, samples, seed_flag, frequency_flag, witness,
                                  out_dir, format);
        }
        if (app.got_subcommand(roc)) {
            return cmd_roc(score_paths, config_path, balance_flag, format, out_dir);
        }
        if (app.got_subcommand(scatter)) {
            return cmd_scatter(config_path, scatter_metric, balance_flag.value_or(0.5),
                               scatter_n, seed_flag, out_dir, svg);
        }
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_input_error;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config_error;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config_error;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config_error;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
    return exit_ok;
}
