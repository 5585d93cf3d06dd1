#include "utilrank/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace utilrank {

ConfusionMatrix::ConfusionMatrix(double c00, double c01, double c10, double c11,
                                 std::optional<std::uint64_t> total)
    : c00_(c00), c01_(c01), c10_(c10), c11_(c11), total_(total) {
    if (!(c00 >= 0.0 && c01 >= 0.0 && c10 >= 0.0 && c11 >= 0.0)) {
        throw std::invalid_argument("confusion matrix entries must be nonnegative");
    }
}

ConfusionMatrix ConfusionMatrix::from_counts(std::uint64_t n00, std::uint64_t n01,
                                             std::uint64_t n10, std::uint64_t n11) {
    const std::uint64_t n = n00 + n01 + n10 + n11;
    if (n == 0) {
        throw std::invalid_argument("confusion matrix needs at least one count");
    }
    const double dn = static_cast<double>(n);
    return ConfusionMatrix(static_cast<double>(n00) / dn, static_cast<double>(n01) / dn,
                           static_cast<double>(n10) / dn, static_cast<double>(n11) / dn, n);
}

double ConfusionMatrix::at(int predicted, int true_class) const {
    if (predicted < 0 || predicted > 1 || true_class < 0 || true_class > 1) {
        throw std::out_of_range("class index must be 0 or 1");
    }
    if (predicted == 0) return true_class == 0 ? c00_ : c01_;
    return true_class == 0 ? c10_ : c11_;
}

bool ConfusionMatrix::is_normalized(double tol) const {
    return std::abs(sum() - 1.0) <= tol;
}

ConfusionMatrix ConfusionMatrix::normalized() const {
    const double s = sum();
    if (s <= 0.0) {
        throw std::invalid_argument("cannot normalize an all-zero confusion matrix");
    }
    return ConfusionMatrix(c00_ / s, c01_ / s, c10_ / s, c11_ / s, total_);
}

UtilityMatrix::UtilityMatrix(double u00, double u01, double u10, double u11)
    : u00_(u00), u01_(u01), u10_(u10), u11_(u11) {
    if (!(std::isfinite(u00) && std::isfinite(u01) && std::isfinite(u10) && std::isfinite(u11))) {
        throw std::invalid_argument("utility entries must be finite");
    }
    if (u00 == u01 && u01 == u10 && u10 == u11) {
        throw std::invalid_argument(
            "all four utilities are equal; every decision is equivalent");
    }
}

double UtilityMatrix::at(int decision, int true_class) const {
    if (decision < 0 || decision > 1 || true_class < 0 || true_class > 1) {
        throw std::out_of_range("class index must be 0 or 1");
    }
    if (decision == 0) return true_class == 0 ? u00_ : u01_;
    return true_class == 0 ? u10_ : u11_;
}

double UtilityMatrix::min_entry() const {
    return std::min(std::min(u00_, u01_), std::min(u10_, u11_));
}

double UtilityMatrix::max_entry() const {
    return std::max(std::max(u00_, u01_), std::max(u10_, u11_));
}

bool UtilityMatrix::is_normalized(double tol) const {
    return std::abs(min_entry()) <= tol && std::abs(max_entry() - 1.0) <= tol;
}

double UtilityMatrix::correct_margin(int true_class) const {
    if (true_class == 0) return u00_ - u10_;
    if (true_class == 1) return u11_ - u01_;
    throw std::out_of_range("class index must be 0 or 1");
}

bool UtilityMatrix::almost_equal(const UtilityMatrix& other, double tol) const {
    return std::abs(u00_ - other.u00_) <= tol && std::abs(u01_ - other.u01_) <= tol &&
           std::abs(u10_ - other.u10_) <= tol && std::abs(u11_ - other.u11_) <= tol;
}

bool UtilityCoords::is_feasible(double tol) const {
    return std::abs(x) <= 1.0 + tol && std::abs(y) <= 1.0 + tol &&
           y - x <= 1.0 + tol && x - y <= 1.0 + tol;
}

ClassDistribution::ClassDistribution(double prob0, double prob1) : p0(prob0), p1(prob1) {
    if (!(p0 >= 0.0 && p1 >= 0.0)) {
        throw std::invalid_argument("class probabilities must be nonnegative");
    }
    if (std::abs(p0 + p1 - 1.0) > normalization_tolerance) {
        throw std::invalid_argument("class probabilities must sum to one");
    }
}

ClassDistribution ClassDistribution::from_weights(double w0, double w1) {
    if (!(w0 >= 0.0 && w1 >= 0.0) || w0 + w1 <= 0.0) {
        throw std::invalid_argument("class weights must be nonnegative and not both zero");
    }
    const double s = w0 + w1;
    return ClassDistribution(w0 / s, w1 / s);
}

UtilityMixture::UtilityMixture(std::vector<std::pair<double, UtilityMatrix>> components)
    : components_(std::move(components)) {
    if (components_.empty()) {
        throw std::invalid_argument("utility mixture must have at least one component");
    }
    double total = 0.0;
    for (const auto& [weight, matrix] : components_) {
        (void)matrix;
        if (weight < 0.0) {
            throw std::invalid_argument("mixture weights must be nonnegative");
        }
        total += weight;
    }
    if (std::abs(total - 1.0) > normalization_tolerance) {
        throw std::invalid_argument("mixture weights must sum to one");
    }
}

double utility_yield(const UtilityMatrix& utilities, const ConfusionMatrix& confusion) {
    if (!confusion.is_normalized()) {
        throw std::invalid_argument("utility_yield requires a normalized confusion matrix");
    }
    return utilities.u00() * confusion.c00() + utilities.u01() * confusion.c01() +
           utilities.u10() * confusion.c10() + utilities.u11() * confusion.c11();
}

UtilityMatrix affine_transform(const UtilityMatrix& utilities, double scale, double shift) {
    if (!(scale > 0.0)) {
        throw std::invalid_argument("utility scale factor must be positive");
    }
    return UtilityMatrix(scale * utilities.u00() + shift, scale * utilities.u01() + shift,
                         scale * utilities.u10() + shift, scale * utilities.u11() + shift);
}

UtilityMatrix normalize_utilities(const UtilityMatrix& utilities) {
    const double lo = utilities.min_entry();
    const double hi = utilities.max_entry();
    // Constant matrices cannot reach the constructor, but the subtraction
    // could still collapse the range for near-constant input.
    const double range = hi - lo;
    if (!(range > 0.0)) {
        throw std::domain_error("utility matrix has no spread; nothing to normalize");
    }
    return UtilityMatrix((utilities.u00() - lo) / range, (utilities.u01() - lo) / range,
                         (utilities.u10() - lo) / range, (utilities.u11() - lo) / range);
}

UtilityMatrix coords_to_matrix(const UtilityCoords& coords) {
    if (!coords.is_feasible()) {
        throw std::invalid_argument("coordinates outside the feasible utility region");
    }
    const double x = coords.x;
    const double y = coords.y;
    return UtilityMatrix(x > 0.0 ? 1.0 - x : 1.0,  // u00
                         y > 0.0 ? y : 0.0,        // u01
                         y < 0.0 ? -y : 0.0,       // u10
                         x < 0.0 ? 1.0 + x : 1.0); // u11
}

UtilityCoords matrix_to_coords(const UtilityMatrix& utilities) {
    if (!utilities.is_normalized()) {
        throw std::invalid_argument(
            "matrix_to_coords requires a normalized utility matrix; call "
            "normalize_utilities first");
    }
    if (!utilities.is_feasible(normalization_tolerance)) {
        throw std::invalid_argument("matrix_to_coords requires a feasible utility matrix");
    }
    // In the normalized feasible set exactly one diagonal entry is < 1 and at
    // most one off-diagonal entry is > 0, so these differences recover (x, y).
    return UtilityCoords{utilities.u11() - utilities.u00(),
                         utilities.u01() - utilities.u10()};
}

UtilityMatrix expected_utility_matrix(const UtilityMixture& mixture) {
    double e00 = 0.0, e01 = 0.0, e10 = 0.0, e11 = 0.0;
    for (const auto& [weight, matrix] : mixture.components()) {
        e00 += weight * matrix.u00();
        e01 += weight * matrix.u01();
        e10 += weight * matrix.u10();
        e11 += weight * matrix.u11();
    }
    return UtilityMatrix(e00, e01, e10, e11);
}

ClassDecision optimal_class(const UtilityMatrix& utilities, const ClassDistribution& probs) {
    ClassDecision decision;
    decision.expected_utility[0] = utilities.u00() * probs.p0 + utilities.u01() * probs.p1;
    decision.expected_utility[1] = utilities.u10() * probs.p0 + utilities.u11() * probs.p1;
    // Strict comparison keeps class 0 on ties.
    decision.chosen = decision.expected_utility[1] > decision.expected_utility[0] ? 1 : 0;
    return decision;
}

} // namespace utilrank
