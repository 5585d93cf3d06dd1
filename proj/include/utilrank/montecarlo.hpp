#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "utilrank/core.hpp"
#include "utilrank/metrics.hpp"
#include "utilrank/sampling.hpp"

namespace utilrank {

inline constexpr std::uint64_t default_experiment_seed = 1729;

/// Parameters of the pairwise misranking experiment. Per trial: a true
/// utility matrix is drawn from the prior, an erroneous copy is drawn per
/// sigma, a class fraction is drawn uniformly, two confusion matrices
/// sharing that fraction are drawn, and every evaluator's ordering of the
/// pair is compared against the ordering by true utility yield.
struct ExperimentConfig {
    UtilityPriorKind prior = UtilityPriorKind::uniform;
    std::vector<double> sigmas = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
    std::vector<std::string> metrics = metric_names();
    std::uint64_t pairs = 1'000'000;
    std::uint64_t seed = default_experiment_seed;

    void validate() const;
};

/// Misranking fraction of one evaluator with its binomial standard error.
struct MisrankEstimate {
    std::string evaluator;
    std::uint64_t misranked = 0;
    std::uint64_t pairs = 0;
    double fraction = 0.0;
    double std_error = 0.0;
};

struct ExperimentReport {
    std::vector<MisrankEstimate> metric_estimates;
    std::vector<double> sigmas;
    std::vector<MisrankEstimate> sigma_estimates; // parallel to `sigmas`
    std::uint64_t pairs = 0;
    std::uint64_t seed = 0;
    UtilityPriorKind prior = UtilityPriorKind::uniform;

    const MisrankEstimate* metric_estimate(const std::string& name) const;
    const MisrankEstimate* sigma_estimate(double sigma) const;
};

/// Runs the experiment, split into fixed-size trial chunks each owning a
/// derived substream; OpenMP distributes chunks over threads. Counts are
/// summed, so the report is bit-identical for any thread count.
ExperimentReport run_pairwise_experiment(const ExperimentConfig& config);

/// Single-threaded reference walking the identical chunk layout; must agree
/// with run_pairwise_experiment exactly.
ExperimentReport run_pairwise_experiment_serial(const ExperimentConfig& config);

struct SweepRow {
    double sigma = 0.0;
    double fraction = 0.0;
    double std_error = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double linear_fit_r2 = 0.0;                  // of fraction vs sigma
    std::vector<MisrankEstimate> metric_reference; // horizontal reference lines
    ExperimentReport report;
};

/// Misranking fraction as a function of the utility assessment error,
/// with the per-metric fractions as reference lines.
SweepResult sweep_error_levels(const ExperimentConfig& config,
                               const std::vector<double>& sigma_grid);

struct ScatterPoint {
    double yield = 0.0;
    double score = 0.0;
    int pair_id = -1;      // -1 for plain samples, otherwise witness pair id
    bool reversed = false; // true on the two rows of a misranked pair
};

/// Confusion matrices at fixed f0 scored by the true yield and by a metric,
/// plus up to max_witness_pairs misranked pairs flagged for plotting.
std::vector<ScatterPoint> scatter_dataset(const UtilityMatrix& utilities,
                                          const MetricDescriptor& metric, double f0,
                                          std::size_t n, std::uint64_t seed,
                                          std::size_t max_witness_pairs = 3);

} // namespace utilrank
