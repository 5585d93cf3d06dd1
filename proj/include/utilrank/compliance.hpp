#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "utilrank/core.hpp"
#include "utilrank/metrics.hpp"

namespace utilrank {

// A metric is decision-theoretically sound only if, on a fixed test set, its
// ranking of confusion matrices agrees with some linear score
// X*C00 + Y*C11 whose constants X, Y do not change with the class
// frequencies. These routines decide that property empirically: directions
// (X, Y) = (cos a, sin a) are scanned per frequency, and the verdict
// intersects the admissible angle sets across a frequency grid.

/// Closed range of direction angles, degrees in [0, 90].
struct AngleInterval {
    double lo_deg = 0.0;
    double hi_deg = 0.0;

    double width() const { return hi_deg - lo_deg; }
};

/// Angles consistent with a metric's ordering at one class frequency.
struct DirectionScan {
    std::vector<AngleInterval> intervals;
    std::size_t pairs_used = 0;
    std::size_t pairs_rejected = 0; // near ties and undefined scores
};

/// All direction angles whose linear ordering matches the metric's ordering
/// over `samples` sampled confusion-matrix pairs at class frequency f0.
/// The scan is exact: survival is probed between consecutive constraint
/// boundaries (finer than the 0.5-degree reporting grid), so intervals
/// narrower than the grid are still found and endpoints are sharp.
DirectionScan admissible_directions(const MetricDescriptor& metric, double f0,
                                    std::size_t samples, std::uint64_t seed);

/// Two confusion matrices with a common class frequency that the metric
/// orders opposite to the utility yield.
struct WitnessPair {
    ConfusionMatrix first;
    ConfusionMatrix second;
    double metric_first = 0.0;
    double metric_second = 0.0;
    double yield_first = 0.0;
    double yield_second = 0.0;
    double f0 = 0.0;
};

/// Searches sampled pairs at frequency f0 for one misranked by the metric
/// relative to utility_yield(utilities, .). Both differences must exceed
/// 1e-6 in magnitude. Not finding one within max_draws is a value, not an
/// error.
std::optional<WitnessPair> find_reversal_witness(const MetricDescriptor& metric,
                                                 const UtilityMatrix& utilities, double f0,
                                                 std::size_t max_draws, std::uint64_t seed);

struct ComplianceReport {
    std::string metric;
    bool compliant = false;
    std::vector<double> frequencies;
    std::vector<DirectionScan> per_frequency; // parallel to `frequencies`
    std::vector<AngleInterval> intersection;
    // Present iff compliant: a direction that reproduces the metric's
    // ordering at every grid frequency. Preference goes to the simplest
    // rational direction inside the admissible set, so that the reported
    // coefficients generalize beyond the sampled pairs.
    std::optional<double> direction_deg;
    std::optional<std::pair<double, double>> direction_xy;
    // Present iff non-compliant: a misranked pair against the identity
    // utility matrix at one of the grid frequencies.
    std::optional<WitnessPair> witness;
    std::size_t samples_per_frequency = 0;
    std::uint64_t seed = 0;
};

inline const std::vector<double>& default_frequency_grid() {
    static const std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9};
    return grid;
}

inline constexpr std::size_t default_compliance_samples = 2000;

/// Verdict over a frequency grid: compliant iff some direction is admissible
/// at every frequency. Deterministic given (grid, samples, seed).
ComplianceReport compliance_verdict(const MetricDescriptor& metric,
                                    const std::vector<double>& frequency_grid,
                                    std::size_t samples, std::uint64_t seed);

/// Set intersection of two unions of closed angle intervals.
std::vector<AngleInterval> intersect_interval_sets(const std::vector<AngleInterval>& a,
                                                   const std::vector<AngleInterval>& b);

} // namespace utilrank
