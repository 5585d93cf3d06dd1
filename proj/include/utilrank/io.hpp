#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "utilrank/compliance.hpp"
#include "utilrank/core.hpp"
#include "utilrank/montecarlo.hpp"
#include "utilrank/roc.hpp"

namespace utilrank {

/// Malformed input data (predictions, scores, curves). CLI exit code 2.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration (utility config document, bad parameters).
/// CLI exit code 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LabeledPredictions {
    std::vector<int> true_labels;
    std::vector<int> predicted_labels;
};

struct LabeledScores {
    std::vector<int> true_labels;
    std::vector<double> scores;
};

/// CSV with header "true_label,predicted_label"; labels in {0,1}.
/// Errors carry 1-based line numbers.
LabeledPredictions read_predictions_csv(const std::string& path);

/// CSV with header "true_label,score".
LabeledScores read_scores_csv(const std::string& path);

/// Count matrix of the prediction rows, normalized, with N retained.
ConfusionMatrix confusion_from_predictions(const LabeledPredictions& predictions);

/// CSV with header "f,t", one vertex per row.
RocCurve read_curve_csv(const std::string& path);
std::string curve_to_csv(const RocCurve& curve);

/// Structured configuration document (JSON): utility matrix or mixture,
/// optional class balance, seed, and experiment parameters.
struct UtilityConfig {
    std::optional<UtilityMatrix> utilities;
    std::optional<UtilityMixture> mixture;
    std::optional<double> balance;
    std::optional<std::uint64_t> seed;
    std::optional<UtilityPriorKind> prior;
    std::optional<std::vector<double>> sigmas;
    std::optional<std::uint64_t> pairs;
    std::optional<std::vector<std::string>> metrics;

    /// The matrix to evaluate with: the explicit one, or the expectation of
    /// the mixture. Throws ConfigError when neither is present.
    UtilityMatrix effective_utilities() const;
};

UtilityConfig read_utility_config(const std::string& path);

UtilityPriorKind prior_from_string(const std::string& name);
std::string prior_to_string(UtilityPriorKind kind);

/// Shortest exact decimal form of a double ("%.17g" fallback); stable across
/// runs and thread counts.
std::string format_full(double value);

std::string experiment_report_json(const ExperimentReport& report,
                                   std::optional<double> linear_fit_r2 = std::nullopt);
std::string experiment_report_csv(const ExperimentReport& report);

std::string scatter_csv(const std::vector<ScatterPoint>& points);
std::string scatter_svg(const std::vector<ScatterPoint>& points, const std::string& x_label,
                        const std::string& y_label);

std::string compliance_reports_json(const std::vector<ComplianceReport>& reports);
std::string witness_csv(const std::vector<ComplianceReport>& reports);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

} // namespace utilrank
