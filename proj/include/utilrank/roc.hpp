#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "utilrank/core.hpp"

namespace utilrank {

struct RocPoint {
    double f = 0.0; // false-positive rate
    double t = 0.0; // true-positive rate
};

/// Monotone piecewise-linear ROC curve from (0,0) to (1,1). When the curve
/// came from a threshold sweep, `thresholds` holds the score cutoff of each
/// vertex (infinity for the (0,0) vertex).
class RocCurve {
public:
    explicit RocCurve(std::vector<RocPoint> points, std::vector<double> thresholds = {});

    const std::vector<RocPoint>& points() const { return points_; }
    const std::vector<double>& thresholds() const { return thresholds_; }
    std::size_t size() const { return points_.size(); }

    /// Upper piecewise-linear interpolation t(f); at a vertical jump the
    /// highest attainable t is returned.
    double t_at(double f) const;

    static RocCurve diagonal();

private:
    std::vector<RocPoint> points_;
    std::vector<double> thresholds_;
};

/// Threshold sweep over distinct score values; a higher score predicts
/// class 0 ("positive"). Tied scores are grouped into a single step. Both
/// classes must be present.
RocCurve curve_from_scores(const std::vector<int>& labels, const std::vector<double>& scores);

/// Confusion matrix reachable at an ROC point for a test set whose class-0
/// proportion is `balance`: [[B t, (1-B) f], [B (1-t), (1-B)(1-f)]].
ConfusionMatrix confusion_at(const RocPoint& point, double balance);

/// Trapezoidal area under the curve.
double auc(const RocCurve& curve);

/// A classification problem ROC decisions are made against: feasible
/// utilities plus the class-0 proportion B of the test set.
struct OperatingContext {
    UtilityMatrix utilities;
    double balance;

    OperatingContext(UtilityMatrix u, double b);

    /// Slope of the family of equal-yield lines in ROC space:
    /// (U11 - U01)(1 - B) / ((U00 - U10) B). Infinite when U00 == U10.
    double slope() const;
};

struct OperatingPoint {
    std::size_t vertex = 0; // index into the curve's points
    double f = 0.0;
    double t = 0.0;
    double yield = 0.0;
};

/// The curve vertex maximizing the utility yield, found as the tangency
/// point of the equal-yield line family with the curve's upper convex hull.
/// Ties break toward smaller f. With U00 == U10 the equal-yield lines are
/// vertical and f* = 0.
OperatingPoint optimal_operating_point(const RocCurve& curve, const OperatingContext& ctx);

struct TangentRanking {
    std::vector<std::size_t> order; // curve indices, best first
    std::vector<double> intercepts; // per input curve
    std::vector<double> yields;     // optimal yield per input curve
};

/// Ranks curves by the intercept of the touching equal-yield line; identical
/// to ranking by optimal achievable yield.
TangentRanking compare_by_tangent(const std::vector<RocCurve>& curves,
                                  const OperatingContext& ctx);

/// True when a's curve lies at or above b's everywhere and strictly above
/// somewhere.
bool dominates(const RocCurve& a, const RocCurve& b);

/// Deterministic grid search for a pair of curves whose AUC order is the
/// reverse of their optimal-yield order under the given context. Returns
/// (higher-yield curve, higher-AUC curve) when found.
std::optional<std::pair<RocCurve, RocCurve>> find_auc_reversal_pair(const OperatingContext& ctx);

} // namespace utilrank
