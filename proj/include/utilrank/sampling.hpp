#pragma once

#include <array>
#include <cstdint>

#include "utilrank/core.hpp"

namespace utilrank {

// Giving up on a rejection sampler after this many attempts means the
// requested distribution is essentially empty; treated as misconfiguration.
inline constexpr std::size_t max_rejection_attempts = 1'000'000;

/// xoshiro256++ generator seeded through splitmix64. The standard library
/// distributions are implementation-defined, so uniform and normal variates
/// are produced here directly; streams are bit-identical on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent generator for logical task `stream_id` under a master
    /// seed. Pure function of its arguments: results never depend on which
    /// thread runs the task.
    static Rng substream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform();

    /// Uniform on (0, 1).
    double uniform_open();

    /// Standard normal via Box-Muller (cosine branch).
    double normal();

private:
    std::array<std::uint64_t, 4> state_{};
};

/// Inverse CDF of the linearly increasing density on [0.5, 1]:
/// p(r) proportional to (r - 0.5), so r = 0.5 + 0.5*sqrt(u).
/// Median 0.85355, quartiles 0.75 and 0.93301.
double rate_from_uniform(double u);

/// One draw from the linear-density rate distribution.
double sample_rate(Rng& rng);

/// Normalized confusion matrix with true-class-0 fraction f0 and the given
/// true-positive and true-negative rates:
/// [[f0*tpr, (1-f0)(1-tnr)], [f0(1-tpr), (1-f0)*tnr]].
ConfusionMatrix confusion_from_rates(double f0, double tpr, double tnr);

/// Confusion matrix at fraction f0 with independently sampled rates.
ConfusionMatrix sample_confusion(double f0, Rng& rng);

enum class UtilityPriorKind { uniform, gaussian };

/// Prior over the feasible coordinate region. The gaussian variant is
/// centred on (0, 0) -- the identity matrix -- with standard deviation 1/3
/// per coordinate, truncated to the region.
struct UtilityPrior {
    UtilityPriorKind kind = UtilityPriorKind::uniform;

    static constexpr double gaussian_sd = 1.0 / 3.0;
};

/// Coordinate draw from the prior; rejection keeps the corner cuts.
UtilityCoords sample_feasible_coords(const UtilityPrior& prior, Rng& rng);

/// Normalized feasible utility matrix drawn from the prior.
UtilityMatrix sample_true_utility(const UtilityPrior& prior, Rng& rng);

/// Adds joint Gaussian(0, sigma^2) errors to the four entries of a
/// normalized feasible matrix, rejection-sampled until all entries stay in
/// [0, 1] and correct classification stays at least as good as
/// misclassification in each column. The result is not renormalized.
UtilityMatrix perturb_utility(const UtilityMatrix& utilities, double sigma, Rng& rng);

} // namespace utilrank
