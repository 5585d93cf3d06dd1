#include "utilrank/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace utilrank {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
}

Rng Rng::substream(std::uint64_t master_seed, std::uint64_t stream_id) {
    // Mix the stream id through splitmix64 before combining so that
    // consecutive ids land far apart in seed space.
    std::uint64_t sm = stream_id;
    const std::uint64_t scrambled = splitmix64(sm);
    return Rng(master_seed ^ scrambled);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
    double u;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

double Rng::normal() {
    const double u1 = 1.0 - uniform(); // (0, 1], keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

double rate_from_uniform(double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw std::invalid_argument("rate_from_uniform needs u in [0, 1]");
    }
    return 0.5 + 0.5 * std::sqrt(u);
}

double sample_rate(Rng& rng) { return rate_from_uniform(rng.uniform()); }

ConfusionMatrix confusion_from_rates(double f0, double tpr, double tnr) {
    if (!(f0 > 0.0 && f0 < 1.0)) {
        throw std::invalid_argument("class fraction must lie strictly between 0 and 1");
    }
    if (!(tpr >= 0.0 && tpr <= 1.0 && tnr >= 0.0 && tnr <= 1.0)) {
        throw std::invalid_argument("rates must lie in [0, 1]");
    }
    // Off-diagonal entries come from subtraction so that the column sums
    // reproduce f0 and 1 - f0 exactly.
    const double f1 = 1.0 - f0;
    const double c00 = f0 * tpr;
    const double c11 = f1 * tnr;
    const double c10 = std::max(0.0, f0 - c00);
    const double c01 = std::max(0.0, f1 - c11);
    return ConfusionMatrix(c00, c01, c10, c11);
}

ConfusionMatrix sample_confusion(double f0, Rng& rng) {
    const double tpr = sample_rate(rng);
    const double tnr = sample_rate(rng);
    return confusion_from_rates(f0, tpr, tnr);
}

UtilityCoords sample_feasible_coords(const UtilityPrior& prior, Rng& rng) {
    for (std::size_t attempt = 0; attempt < max_rejection_attempts; ++attempt) {
        UtilityCoords coords;
        if (prior.kind == UtilityPriorKind::uniform) {
            coords.x = 2.0 * rng.uniform() - 1.0;
            coords.y = 2.0 * rng.uniform() - 1.0;
        } else {
            coords.x = UtilityPrior::gaussian_sd * rng.normal();
            coords.y = UtilityPrior::gaussian_sd * rng.normal();
        }
        if (coords.is_feasible()) return coords;
    }
    throw std::runtime_error("coordinate prior rejection cap exceeded; sampler misconfigured");
}

UtilityMatrix sample_true_utility(const UtilityPrior& prior, Rng& rng) {
    return coords_to_matrix(sample_feasible_coords(prior, rng));
}

UtilityMatrix perturb_utility(const UtilityMatrix& utilities, double sigma, Rng& rng) {
    if (sigma < 0.0) {
        throw std::invalid_argument("error standard deviation must be nonnegative");
    }
    if (sigma == 0.0) return utilities;
    if (!utilities.is_normalized()) {
        throw std::invalid_argument("perturb_utility expects a normalized utility matrix");
    }
    for (std::size_t attempt = 0; attempt < max_rejection_attempts; ++attempt) {
        const double u00 = utilities.u00() + sigma * rng.normal();
        const double u01 = utilities.u01() + sigma * rng.normal();
        const double u10 = utilities.u10() + sigma * rng.normal();
        const double u11 = utilities.u11() + sigma * rng.normal();
        const bool in_box = u00 >= 0.0 && u00 <= 1.0 && u01 >= 0.0 && u01 <= 1.0 &&
                            u10 >= 0.0 && u10 <= 1.0 && u11 >= 0.0 && u11 <= 1.0;
        if (in_box && u00 >= u10 && u11 >= u01) {
            return UtilityMatrix(u00, u01, u10, u11);
        }
    }
    throw std::runtime_error("utility perturbation rejection cap exceeded");
}

} // namespace utilrank
