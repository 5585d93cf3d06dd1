#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace utilrank {

// Absolute tolerance for "sums to one" checks on normalized matrices and
// probability vectors.
inline constexpr double normalization_tolerance = 1e-12;

// Default absolute tolerance for comparing yields and scores.
inline constexpr double value_tolerance = 1e-9;

/// 2x2 confusion matrix. Entry (i, j) holds the count or relative frequency
/// of items the classifier assigned to class i whose true class is j.
/// Class 0 is "positive". Rows are classifier output, columns true class.
class ConfusionMatrix {
public:
    ConfusionMatrix(double c00, double c01, double c10, double c11,
                    std::optional<std::uint64_t> total = std::nullopt);

    /// Builds the normalized matrix from raw counts, remembering N.
    static ConfusionMatrix from_counts(std::uint64_t n00, std::uint64_t n01,
                                       std::uint64_t n10, std::uint64_t n11);

    double at(int predicted, int true_class) const;
    double c00() const { return c00_; }
    double c01() const { return c01_; }
    double c10() const { return c10_; }
    double c11() const { return c11_; }
    std::optional<std::uint64_t> total() const { return total_; }

    double sum() const { return c00_ + c01_ + c10_ + c11_; }
    bool is_normalized(double tol = normalization_tolerance) const;

    /// Frequency of true class 0 in the test set (column sum).
    double f0() const { return c00_ + c10_; }
    double f1() const { return c01_ + c11_; }

    /// Entrywise division by the grand sum.
    ConfusionMatrix normalized() const;

private:
    double c00_, c01_, c10_, c11_;
    std::optional<std::uint64_t> total_;
};

/// 2x2 utility matrix. U(i, j) is the utility of deciding class i when class
/// j is true, in whatever unit the problem uses (currency, months of life,
/// ...). Rows are decisions, columns true classes. A matrix with all four
/// entries equal makes every decision equivalent and is rejected.
class UtilityMatrix {
public:
    UtilityMatrix(double u00, double u01, double u10, double u11);

    static UtilityMatrix identity() { return UtilityMatrix(1.0, 0.0, 0.0, 1.0); }

    double at(int decision, int true_class) const;
    double u00() const { return u00_; }
    double u01() const { return u01_; }
    double u10() const { return u10_; }
    double u11() const { return u11_; }

    double min_entry() const;
    double max_entry() const;

    /// Correct classification is at least as good as misclassification,
    /// column by column: U00 >= U10 and U11 >= U01. The tolerance admits
    /// matrices that land on the boundary up to rounding.
    bool is_feasible(double tol = 0.0) const {
        return u00_ >= u10_ - tol && u11_ >= u01_ - tol;
    }

    /// Min entry 0 and max entry 1 (the standard form).
    bool is_normalized(double tol = normalization_tolerance) const;

    /// How much better the correct decision is for the given true class:
    /// U00 - U10 for class 0, U11 - U01 for class 1.
    double correct_margin(int true_class) const;

    bool almost_equal(const UtilityMatrix& other, double tol = value_tolerance) const;

private:
    double u00_, u01_, u10_, u11_;
};

/// Coordinates of a normalized feasible utility matrix in the 2-D metric
/// space. The feasible region is the square |x|,|y| <= 1 with the two
/// corners y - x > 1 and x - y > 1 cut off.
struct UtilityCoords {
    double x = 0.0;
    double y = 0.0;

    bool is_feasible(double tol = 0.0) const;
};

/// Probabilities of the two classes.
struct ClassDistribution {
    double p0 = 0.5;
    double p1 = 0.5;

    ClassDistribution(double prob0, double prob1);

    /// Normalizes arbitrary nonnegative weights.
    static ClassDistribution from_weights(double w0, double w1);
};

/// Probability-weighted set of candidate utility matrices, used when the
/// true utilities of a problem are uncertain.
class UtilityMixture {
public:
    explicit UtilityMixture(std::vector<std::pair<double, UtilityMatrix>> components);

    const std::vector<std::pair<double, UtilityMatrix>>& components() const {
        return components_;
    }

private:
    std::vector<std::pair<double, UtilityMatrix>> components_;
};

/// Average utility per classified item: sum over i,j of U(i,j) * C(i,j).
/// C must be normalized.
double utility_yield(const UtilityMatrix& utilities, const ConfusionMatrix& confusion);

/// Entrywise scale * U + shift with scale > 0. A change of unit and zero of
/// the utility scale; never alters the ranking of classifiers.
UtilityMatrix affine_transform(const UtilityMatrix& utilities, double scale, double shift);

/// Brings a utility matrix to the standard form with min entry 0 and max
/// entry 1. Idempotent; rejects constant matrices.
UtilityMatrix normalize_utilities(const UtilityMatrix& utilities);

/// Normalized feasible matrix for a point of the coordinate space:
/// [[1 - x if x>0, y if y>0], [-y if y<0, 1 + x if x<0]].
UtilityMatrix coords_to_matrix(const UtilityCoords& coords);

/// Inverse of coords_to_matrix. The matrix must already be normalized and
/// feasible; no implicit normalization happens here.
UtilityCoords matrix_to_coords(const UtilityMatrix& utilities);

/// Entrywise expectation of a utility mixture.
UtilityMatrix expected_utility_matrix(const UtilityMixture& mixture);

struct ClassDecision {
    int chosen = 0;
    std::array<double, 2> expected_utility{0.0, 0.0};
};

/// Expected-utility maximizing class for the given class probabilities.
/// Ties are broken toward class 0.
ClassDecision optimal_class(const UtilityMatrix& utilities, const ClassDistribution& probs);

} // namespace utilrank
