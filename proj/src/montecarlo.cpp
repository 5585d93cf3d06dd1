#include "utilrank/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "utilrank/compliance.hpp"

namespace utilrank {

namespace {

constexpr std::uint64_t chunk_size = 1024;

struct Counters {
    std::vector<std::uint64_t> metric_misranks;
    std::vector<std::uint64_t> sigma_misranks;

    Counters(std::size_t n_metrics, std::size_t n_sigmas)
        : metric_misranks(n_metrics, 0), sigma_misranks(n_sigmas, 0) {}

    void add(const Counters& other) {
        for (std::size_t i = 0; i < metric_misranks.size(); ++i) {
            metric_misranks[i] += other.metric_misranks[i];
        }
        for (std::size_t i = 0; i < sigma_misranks.size(); ++i) {
            sigma_misranks[i] += other.sigma_misranks[i];
        }
    }
};

// All trials of one chunk, drawn from the chunk's own substream. This is the
// hot kernel; it must stay a pure function of (config, chunk index).
void run_chunk(const ExperimentConfig& config,
               const std::vector<const MetricDescriptor*>& metrics, std::uint64_t chunk,
               std::uint64_t trials, Counters& counters) {
    Rng rng = Rng::substream(config.seed, chunk);
    const UtilityPrior prior{config.prior};
    std::vector<UtilityMatrix> perturbed;
    perturbed.reserve(config.sigmas.size());

    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        const UtilityMatrix true_utilities = sample_true_utility(prior, rng);

        perturbed.clear();
        for (double sigma : config.sigmas) {
            perturbed.push_back(perturb_utility(true_utilities, sigma, rng));
        }

        const double f0 = rng.uniform_open(); // never exactly 0 or 1
        const ConfusionMatrix first = sample_confusion(f0, rng);
        const ConfusionMatrix second = sample_confusion(f0, rng);

        const double true_diff =
            utility_yield(true_utilities, second) - utility_yield(true_utilities, first);

        for (std::size_t m = 0; m < metrics.size(); ++m) {
            const double diff = metrics[m]->score(second) - metrics[m]->score(first);
            if (diff * true_diff < 0.0) ++counters.metric_misranks[m];
        }
        for (std::size_t k = 0; k < perturbed.size(); ++k) {
            const double diff =
                utility_yield(perturbed[k], second) - utility_yield(perturbed[k], first);
            if (diff * true_diff < 0.0) ++counters.sigma_misranks[k];
        }
    }
}

MisrankEstimate make_estimate(std::string evaluator, std::uint64_t misranked,
                              std::uint64_t pairs) {
    MisrankEstimate estimate;
    estimate.evaluator = std::move(evaluator);
    estimate.misranked = misranked;
    estimate.pairs = pairs;
    estimate.fraction = static_cast<double>(misranked) / static_cast<double>(pairs);
    estimate.std_error =
        std::sqrt(estimate.fraction * (1.0 - estimate.fraction) / static_cast<double>(pairs));
    return estimate;
}

ExperimentReport assemble_report(const ExperimentConfig& config,
                                 const std::vector<const MetricDescriptor*>& metrics,
                                 const Counters& counters) {
    ExperimentReport report;
    report.pairs = config.pairs;
    report.seed = config.seed;
    report.prior = config.prior;
    report.sigmas = config.sigmas;
    for (std::size_t m = 0; m < metrics.size(); ++m) {
        report.metric_estimates.push_back(
            make_estimate(metrics[m]->name, counters.metric_misranks[m], config.pairs));
    }
    for (std::size_t k = 0; k < config.sigmas.size(); ++k) {
        report.sigma_estimates.push_back(
            make_estimate("utility_sigma", counters.sigma_misranks[k], config.pairs));
    }
    return report;
}

std::vector<const MetricDescriptor*> resolve_metrics(const ExperimentConfig& config) {
    std::vector<const MetricDescriptor*> metrics;
    for (const auto& name : config.metrics) {
        const MetricDescriptor* metric = find_metric(name);
        if (metric == nullptr) {
            throw std::invalid_argument("unknown metric in experiment config: " + name);
        }
        metrics.push_back(metric);
    }
    return metrics;
}

ExperimentReport run_experiment(const ExperimentConfig& config, bool parallel) {
    config.validate();
    const auto metrics = resolve_metrics(config);

    const std::uint64_t chunks = (config.pairs + chunk_size - 1) / chunk_size;
    Counters total(metrics.size(), config.sigmas.size());

    if (parallel) {
        std::exception_ptr failure;
#pragma omp parallel
        {
            Counters local(metrics.size(), config.sigmas.size());
#pragma omp for schedule(static)
            for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
                try {
                    const std::uint64_t begin = static_cast<std::uint64_t>(c) * chunk_size;
                    const std::uint64_t trials = std::min(chunk_size, config.pairs - begin);
                    run_chunk(config, metrics, static_cast<std::uint64_t>(c), trials, local);
                } catch (...) {
#pragma omp critical
                    failure = std::current_exception();
                }
            }
#pragma omp critical
            total.add(local);
        }
        if (failure) std::rethrow_exception(failure);
    } else {
        for (std::uint64_t c = 0; c < chunks; ++c) {
            const std::uint64_t begin = c * chunk_size;
            const std::uint64_t trials = std::min(chunk_size, config.pairs - begin);
            run_chunk(config, metrics, c, trials, total);
        }
    }
    return assemble_report(config, metrics, total);
}

} // namespace

void ExperimentConfig::validate() const {
    if (pairs < 10'000) {
        throw std::invalid_argument("experiment needs at least 10000 pairs per estimate");
    }
    for (double sigma : sigmas) {
        if (!(sigma >= 0.0 && sigma <= 0.3)) {
            throw std::invalid_argument("error standard deviations must lie in [0, 0.3]");
        }
    }
    if (metrics.empty() && sigmas.empty()) {
        throw std::invalid_argument("experiment has nothing to evaluate");
    }
}

const MisrankEstimate* ExperimentReport::metric_estimate(const std::string& name) const {
    for (const auto& estimate : metric_estimates) {
        if (estimate.evaluator == name) return &estimate;
    }
    return nullptr;
}

const MisrankEstimate* ExperimentReport::sigma_estimate(double sigma) const {
    for (std::size_t k = 0; k < sigmas.size(); ++k) {
        if (sigmas[k] == sigma) return &sigma_estimates[k];
    }
    return nullptr;
}

ExperimentReport run_pairwise_experiment(const ExperimentConfig& config) {
    return run_experiment(config, true);
}

ExperimentReport run_pairwise_experiment_serial(const ExperimentConfig& config) {
    return run_experiment(config, false);
}

SweepResult sweep_error_levels(const ExperimentConfig& config,
                               const std::vector<double>& sigma_grid) {
    ExperimentConfig sweep_config = config;
    sweep_config.sigmas = sigma_grid;
    SweepResult result;
    result.report = run_pairwise_experiment(sweep_config);
    for (std::size_t k = 0; k < sigma_grid.size(); ++k) {
        const auto& estimate = result.report.sigma_estimates[k];
        result.rows.push_back({sigma_grid[k], estimate.fraction, estimate.std_error});
    }
    result.metric_reference = result.report.metric_estimates;

    // Ordinary least-squares line through the (sigma, fraction) rows.
    const double n = static_cast<double>(result.rows.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& row : result.rows) {
        sx += row.sigma;
        sy += row.fraction;
        sxx += row.sigma * row.sigma;
        sxy += row.sigma * row.fraction;
    }
    const double denom = n * sxx - sx * sx;
    if (denom > 0.0 && result.rows.size() >= 3) {
        const double slope = (n * sxy - sx * sy) / denom;
        const double intercept = (sy - slope * sx) / n;
        double ss_res = 0.0, ss_tot = 0.0;
        const double mean = sy / n;
        for (const auto& row : result.rows) {
            const double fitted = slope * row.sigma + intercept;
            ss_res += (row.fraction - fitted) * (row.fraction - fitted);
            ss_tot += (row.fraction - mean) * (row.fraction - mean);
        }
        result.linear_fit_r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    } else {
        result.linear_fit_r2 = 1.0;
    }
    return result;
}

std::vector<ScatterPoint> scatter_dataset(const UtilityMatrix& utilities,
                                          const MetricDescriptor& metric, double f0,
                                          std::size_t n, std::uint64_t seed,
                                          std::size_t max_witness_pairs) {
    std::vector<ScatterPoint> points;
    points.reserve(n + 2 * max_witness_pairs);
    Rng rng = Rng::substream(seed, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const ConfusionMatrix c = sample_confusion(f0, rng);
        points.push_back({utility_yield(utilities, c), metric.score(c), -1, false});
    }
    for (std::size_t w = 0; w < max_witness_pairs; ++w) {
        const auto witness =
            find_reversal_witness(metric, utilities, f0, 20'000, seed + 1u + w);
        if (!witness) break;
        points.push_back({witness->yield_first, witness->metric_first,
                          static_cast<int>(w), true});
        points.push_back({witness->yield_second, witness->metric_second,
                          static_cast<int>(w), true});
    }
    return points;
}

} // namespace utilrank
