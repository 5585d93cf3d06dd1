#pragma once

#include <cmath>
#include <vector>

#include "utilrank/core.hpp"
#include "utilrank/sampling.hpp"

namespace testutil {

using utilrank::ConfusionMatrix;
using utilrank::UtilityMatrix;

// The two running-example classifiers on the 50/50 test set.
inline ConfusionMatrix classifier_a() { return ConfusionMatrix(0.27, 0.15, 0.23, 0.35); }
inline ConfusionMatrix classifier_b() { return ConfusionMatrix(0.43, 0.18, 0.07, 0.32); }

// Net gains per component for the factory problem, its variant with a
// narrower class-0 margin, and the life-expectancy version (the factory
// matrix shifted by +335).
inline UtilityMatrix factory_utilities() { return UtilityMatrix(15, -335, -35, 165); }
inline UtilityMatrix alternative_utilities() { return UtilityMatrix(45, -335, -65, 165); }
inline UtilityMatrix medical_utilities() { return UtilityMatrix(350, 0, 300, 500); }

// Random normalized confusion matrix with both classes present; the rate
// construction keeps column sums equal to (f0, 1-f0).
inline ConfusionMatrix random_confusion(utilrank::Rng& rng) {
    const double f0 = 0.05 + 0.9 * rng.uniform();
    return utilrank::sample_confusion(f0, rng);
}

// Random feasible normalized utility matrix via the coordinate space.
inline UtilityMatrix random_feasible_utilities(utilrank::Rng& rng) {
    return utilrank::sample_true_utility(utilrank::UtilityPrior{}, rng);
}

inline bool approx(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

// Matches a value printed with two decimals.
inline bool rounds_to(double value, double printed) {
    return std::abs(value - printed) <= 0.005 + 1e-12;
}

} // namespace testutil
