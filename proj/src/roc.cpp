#include "utilrank/roc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace utilrank {

namespace {

double cross(const RocPoint& o, const RocPoint& a, const RocPoint& b) {
    return (a.f - o.f) * (b.t - o.t) - (a.t - o.t) * (b.f - o.f);
}

// Upper convex hull of the curve vertices, left to right. Returns indices
// into the original point list; collinear interior vertices are dropped.
std::vector<std::size_t> upper_hull(const std::vector<RocPoint>& pts) {
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (hull.size() >= 2 &&
               cross(pts[hull[hull.size() - 2]], pts[hull.back()], pts[i]) >= 0.0) {
            hull.pop_back();
        }
        hull.push_back(i);
    }
    return hull;
}

} // namespace

RocCurve::RocCurve(std::vector<RocPoint> points, std::vector<double> thresholds)
    : points_(std::move(points)), thresholds_(std::move(thresholds)) {
    if (points_.size() < 2) {
        throw std::invalid_argument("an ROC curve needs at least two points");
    }
    if (!thresholds_.empty() && thresholds_.size() != points_.size()) {
        throw std::invalid_argument("threshold list must parallel the point list");
    }
    if (points_.front().f != 0.0 || points_.front().t != 0.0) {
        throw std::invalid_argument("ROC curve must begin at (0, 0)");
    }
    if (points_.back().f != 1.0 || points_.back().t != 1.0) {
        throw std::invalid_argument("ROC curve must end at (1, 1)");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        if (!(p.f >= 0.0 && p.f <= 1.0 && p.t >= 0.0 && p.t <= 1.0)) {
            throw std::invalid_argument("ROC points must lie in the unit square");
        }
        if (i > 0 && (p.f < points_[i - 1].f || p.t < points_[i - 1].t)) {
            throw std::invalid_argument("ROC curve must be monotone in f and t");
        }
    }
}

double RocCurve::t_at(double f) const {
    if (!(f >= 0.0 && f <= 1.0)) {
        throw std::invalid_argument("false-positive rate must lie in [0, 1]");
    }
    // Last vertex with f_k <= f; at a shared f this is the highest t.
    std::size_t k = points_.size() - 1;
    while (k > 0 && points_[k].f > f) --k;
    if (points_[k].f == f || k + 1 == points_.size()) return points_[k].t;
    const auto& a = points_[k];
    const auto& b = points_[k + 1];
    return a.t + (b.t - a.t) * (f - a.f) / (b.f - a.f);
}

RocCurve RocCurve::diagonal() {
    return RocCurve({{0.0, 0.0}, {1.0, 1.0}});
}

RocCurve curve_from_scores(const std::vector<int>& labels, const std::vector<double>& scores) {
    if (labels.size() != scores.size()) {
        throw std::invalid_argument("labels and scores must have equal length");
    }
    if (labels.empty()) {
        throw std::invalid_argument("no data");
    }
    std::size_t positives = 0, negatives = 0;
    for (int label : labels) {
        if (label == 0) {
            ++positives;
        } else if (label == 1) {
            ++negatives;
        } else {
            throw std::invalid_argument("labels must be 0 or 1");
        }
    }
    if (positives == 0 || negatives == 0) {
        throw std::invalid_argument("ROC curve needs both classes present");
    }

    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<RocPoint> points{{0.0, 0.0}};
    std::vector<double> thresholds{std::numeric_limits<double>::infinity()};
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        // One step per distinct score: consume the whole tie group.
        while (i < order.size() && scores[order[i]] == threshold) {
            if (labels[order[i]] == 0) {
                ++tp;
            } else {
                ++fp;
            }
            ++i;
        }
        points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                          static_cast<double>(tp) / static_cast<double>(positives)});
        thresholds.push_back(threshold);
    }
    return RocCurve(std::move(points), std::move(thresholds));
}

ConfusionMatrix confusion_at(const RocPoint& point, double balance) {
    if (!(balance > 0.0 && balance < 1.0)) {
        throw std::invalid_argument("class balance must lie strictly between 0 and 1");
    }
    if (!(point.f >= 0.0 && point.f <= 1.0 && point.t >= 0.0 && point.t <= 1.0)) {
        throw std::invalid_argument("ROC point must lie in the unit square");
    }
    return ConfusionMatrix(balance * point.t, (1.0 - balance) * point.f,
                           balance * (1.0 - point.t), (1.0 - balance) * (1.0 - point.f));
}

double auc(const RocCurve& curve) {
    const auto& pts = curve.points();
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        area += (pts[i].f - pts[i - 1].f) * (pts[i].t + pts[i - 1].t) * 0.5;
    }
    return area;
}

OperatingContext::OperatingContext(UtilityMatrix u, double b)
    : utilities(std::move(u)), balance(b) {
    if (!utilities.is_feasible()) {
        throw std::invalid_argument("operating context requires a feasible utility matrix");
    }
    if (!(balance > 0.0 && balance < 1.0)) {
        throw std::invalid_argument("class balance must lie strictly between 0 and 1");
    }
}

double OperatingContext::slope() const {
    const double margin0 = utilities.correct_margin(0);
    const double margin1 = utilities.correct_margin(1);
    if (margin0 == 0.0 && margin1 == 0.0) {
        throw std::domain_error("both correct-classification margins vanish; "
                                "every operating point yields the same utility");
    }
    if (margin0 == 0.0) return std::numeric_limits<double>::infinity();
    return margin1 * (1.0 - balance) / (margin0 * balance);
}

OperatingPoint optimal_operating_point(const RocCurve& curve, const OperatingContext& ctx) {
    const double s = ctx.slope();
    const auto& pts = curve.points();

    std::size_t best;
    if (std::isinf(s)) {
        // Vertical equal-yield lines: any f = 0 vertex is optimal and the
        // yield does not depend on t. The curve starts at (0, 0).
        best = 0;
    } else {
        const auto hull = upper_hull(pts);
        best = hull.front();
        double best_intercept = pts[best].t - s * pts[best].f;
        for (std::size_t idx : hull) {
            const double intercept = pts[idx].t - s * pts[idx].f;
            if (intercept > best_intercept) {
                best_intercept = intercept;
                best = idx;
            }
        }
    }
    OperatingPoint op;
    op.vertex = best;
    op.f = pts[best].f;
    op.t = pts[best].t;
    op.yield = utility_yield(ctx.utilities, confusion_at(pts[best], ctx.balance));
    return op;
}

TangentRanking compare_by_tangent(const std::vector<RocCurve>& curves,
                                  const OperatingContext& ctx) {
    if (curves.size() < 2) {
        throw std::invalid_argument("tangent comparison needs at least two curves");
    }
    const double s = ctx.slope();
    TangentRanking ranking;
    for (const auto& curve : curves) {
        const OperatingPoint op = optimal_operating_point(curve, ctx);
        // With a vertical line family all curves tie; the yield stands in
        // for the (undefined) intercept.
        const double intercept = std::isinf(s) ? op.yield : op.t - s * op.f;
        ranking.intercepts.push_back(intercept);
        ranking.yields.push_back(op.yield);
    }
    ranking.order.resize(curves.size());
    std::iota(ranking.order.begin(), ranking.order.end(), 0);
    std::stable_sort(ranking.order.begin(), ranking.order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return ranking.intercepts[a] > ranking.intercepts[b];
                     });
    return ranking;
}

bool dominates(const RocCurve& a, const RocCurve& b) {
    std::vector<double> breakpoints;
    for (const auto& p : a.points()) breakpoints.push_back(p.f);
    for (const auto& p : b.points()) breakpoints.push_back(p.f);
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    bool strictly_above = false;
    for (double f : breakpoints) {
        const double ta = a.t_at(f);
        const double tb = b.t_at(f);
        if (ta < tb) return false;
        if (ta > tb) strictly_above = true;
    }
    return strictly_above;
}

std::optional<std::pair<RocCurve, RocCurve>> find_auc_reversal_pair(const OperatingContext& ctx) {
    // Family one: an early shoulder followed by a long flat stretch --
    // excellent at small f, poor area. Family two: smooth concave power
    // curves hugging the equal-yield line -- large area, never very far
    // above the line.
    const double auc_margin = 0.02;
    const double yield_margin = 0.005;

    std::vector<RocCurve> steep_family;
    for (double p : {0.03, 0.05, 0.08}) {
        for (double h : {0.72, 0.78, 0.84}) {
            const double shoulder_t = std::min(1.0, h + 0.04);
            steep_family.push_back(RocCurve(
                {{0.0, 0.0}, {p, h}, {0.9, shoulder_t}, {1.0, 1.0}}));
        }
    }

    std::vector<RocCurve> smooth_family;
    for (double alpha : {0.15, 0.2, 0.25, 0.3, 0.4}) {
        for (double mix : {0.0, 0.1, 0.2}) {
            std::vector<RocPoint> pts;
            const int segments = 40;
            for (int i = 0; i <= segments; ++i) {
                const double f = static_cast<double>(i) / segments;
                const double t = (1.0 - mix) * std::pow(f, alpha) + mix * f;
                pts.push_back({f, std::min(t, 1.0)});
            }
            pts.front() = {0.0, 0.0};
            pts.back() = {1.0, 1.0};
            smooth_family.push_back(RocCurve(std::move(pts)));
        }
    }

    for (const auto& steep : steep_family) {
        const auto op_steep = optimal_operating_point(steep, ctx);
        const double auc_steep = auc(steep);
        for (const auto& smooth : smooth_family) {
            const auto op_smooth = optimal_operating_point(smooth, ctx);
            if (auc(smooth) >= auc_steep + auc_margin &&
                op_steep.yield >= op_smooth.yield + yield_margin) {
                return std::make_pair(steep, smooth);
            }
        }
    }
    return std::nullopt;
}

} // namespace utilrank
