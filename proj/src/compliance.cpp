#include "utilrank/compliance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "utilrank/sampling.hpp"

namespace utilrank {

namespace {

constexpr double tie_tolerance = 1e-9;
constexpr double witness_tolerance = 1e-6;
constexpr double pi = 3.14159265358979323846;

double deg_to_rad(double deg) { return deg * pi / 180.0; }

// One sampled pair, reduced to what the ordering test needs: the difference
// vector (dC00, dC11) and the sign of the metric difference.
struct PairConstraint {
    double dx = 0.0;
    double dy = 0.0;
    int sign = 0;
};

std::vector<PairConstraint> sample_constraints(const MetricDescriptor& metric, double f0,
                                               std::size_t samples, Rng& rng,
                                               std::size_t* rejected) {
    std::vector<PairConstraint> constraints;
    constraints.reserve(samples);
    const std::size_t attempt_cap = 100 * samples + 1000;
    std::size_t attempts = 0;
    while (constraints.size() < samples && attempts < attempt_cap) {
        ++attempts;
        const ConfusionMatrix a = sample_confusion(f0, rng);
        const ConfusionMatrix b = sample_confusion(f0, rng);
        double diff;
        try {
            diff = metric.score(b) - metric.score(a);
        } catch (const std::exception&) {
            ++*rejected;
            continue;
        }
        if (std::abs(diff) < tie_tolerance) {
            ++*rejected;
            continue;
        }
        constraints.push_back({b.c00() - a.c00(), b.c11() - a.c11(), diff > 0.0 ? 1 : -1});
    }
    if (constraints.size() < samples) {
        throw std::runtime_error("could not sample enough rankable pairs; "
                                 "metric is nearly constant at this frequency");
    }
    return constraints;
}

bool direction_agrees(double angle_deg, const std::vector<PairConstraint>& constraints) {
    const double rad = deg_to_rad(angle_deg);
    const double cx = std::cos(rad);
    const double cy = std::sin(rad);
    for (const auto& c : constraints) {
        const double linear = cx * c.dx + cy * c.dy;
        if (std::abs(linear) < tie_tolerance) continue; // pair abstains here
        if ((linear > 0.0) != (c.sign > 0)) return false;
    }
    return true;
}

// The agreement predicate is piecewise constant between consecutive
// constraint-boundary angles, so probing one midpoint per gap decides the
// whole gap and interval endpoints come out exact.
std::vector<AngleInterval> scan_intervals(const std::vector<PairConstraint>& constraints) {
    std::vector<double> boundaries{0.0, 90.0};
    for (const auto& c : constraints) {
        if (c.dx * c.dy < 0.0) {
            boundaries.push_back(std::atan2(std::abs(c.dx), std::abs(c.dy)) * 180.0 / pi);
        }
        // dx == 0 or dy == 0 puts the boundary at 0 or 90, already present.
    }
    std::sort(boundaries.begin(), boundaries.end());
    boundaries.erase(std::unique(boundaries.begin(), boundaries.end()), boundaries.end());

    std::vector<AngleInterval> intervals;
    auto absorb = [&intervals](double lo, double hi) {
        if (!intervals.empty() && intervals.back().hi_deg >= lo) {
            intervals.back().hi_deg = std::max(intervals.back().hi_deg, hi);
        } else {
            intervals.push_back({lo, hi});
        }
    };
    for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
        const double lo = boundaries[i];
        const double hi = boundaries[i + 1];
        if (direction_agrees(0.5 * (lo + hi), constraints)) {
            absorb(lo, hi);
        } else if (direction_agrees(lo, constraints)) {
            absorb(lo, lo); // isolated admissible boundary point
        }
    }
    if (!boundaries.empty() && direction_agrees(boundaries.back(), constraints)) {
        absorb(boundaries.back(), boundaries.back());
    }
    return intervals;
}

// Candidate directions tried, in order, when reporting a compliant metric's
// coefficients; integer pairs keep the report exact for the common cases
// (accuracy, the two rates).
const std::vector<std::pair<double, double>>& canonical_directions() {
    static const std::vector<std::pair<double, double>> dirs{
        {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {2.0, 1.0}, {1.0, 2.0}, {3.0, 1.0},
        {1.0, 3.0}, {3.0, 2.0}, {2.0, 3.0}, {4.0, 1.0}, {1.0, 4.0}, {4.0, 3.0},
        {3.0, 4.0}};
    return dirs;
}

} // namespace

std::vector<AngleInterval> intersect_interval_sets(const std::vector<AngleInterval>& a,
                                                   const std::vector<AngleInterval>& b) {
    std::vector<AngleInterval> out;
    for (const auto& ia : a) {
        for (const auto& ib : b) {
            const double lo = std::max(ia.lo_deg, ib.lo_deg);
            const double hi = std::min(ia.hi_deg, ib.hi_deg);
            if (lo <= hi) out.push_back({lo, hi});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const AngleInterval& x, const AngleInterval& y) { return x.lo_deg < y.lo_deg; });
    return out;
}

DirectionScan admissible_directions(const MetricDescriptor& metric, double f0,
                                    std::size_t samples, std::uint64_t seed) {
    if (!(f0 > 0.0 && f0 < 1.0)) {
        throw std::invalid_argument("class frequency must lie strictly between 0 and 1");
    }
    if (samples < 100) {
        throw std::invalid_argument("direction scan needs at least 100 sampled pairs");
    }
    DirectionScan scan;
    Rng rng = Rng::substream(seed, 0);
    auto constraints = sample_constraints(metric, f0, samples, rng, &scan.pairs_rejected);
    scan.pairs_used = constraints.size();
    scan.intervals = scan_intervals(constraints);
    return scan;
}

std::optional<WitnessPair> find_reversal_witness(const MetricDescriptor& metric,
                                                 const UtilityMatrix& utilities, double f0,
                                                 std::size_t max_draws, std::uint64_t seed) {
    if (!(f0 > 0.0 && f0 < 1.0)) {
        throw std::invalid_argument("class frequency must lie strictly between 0 and 1");
    }
    Rng rng(seed);
    for (std::size_t draw = 0; draw < max_draws; ++draw) {
        const ConfusionMatrix a = sample_confusion(f0, rng);
        const ConfusionMatrix b = sample_confusion(f0, rng);
        double ma, mb;
        try {
            ma = metric.score(a);
            mb = metric.score(b);
        } catch (const std::exception&) {
            continue;
        }
        const double metric_diff = mb - ma;
        const double yield_diff = utility_yield(utilities, b) - utility_yield(utilities, a);
        if (std::abs(metric_diff) <= witness_tolerance ||
            std::abs(yield_diff) <= witness_tolerance) {
            continue;
        }
        if ((metric_diff > 0.0) != (yield_diff > 0.0)) {
            return WitnessPair{a, b, ma, mb,
                               utility_yield(utilities, a), utility_yield(utilities, b), f0};
        }
    }
    return std::nullopt;
}

ComplianceReport compliance_verdict(const MetricDescriptor& metric,
                                    const std::vector<double>& frequency_grid,
                                    std::size_t samples, std::uint64_t seed) {
    {
        std::vector<double> distinct = frequency_grid;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() < 3) {
            throw std::invalid_argument("verdict needs at least 3 distinct frequencies");
        }
    }

    ComplianceReport report;
    report.metric = metric.name;
    report.frequencies = frequency_grid;
    report.samples_per_frequency = samples;
    report.seed = seed;
    report.per_frequency.resize(frequency_grid.size());

    const auto n = static_cast<std::int64_t>(frequency_grid.size());
    std::vector<std::vector<PairConstraint>> all_constraints(frequency_grid.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            DirectionScan scan;
            Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
            all_constraints[i] = sample_constraints(metric, frequency_grid[i], samples, rng,
                                                    &scan.pairs_rejected);
            scan.pairs_used = all_constraints[i].size();
            scan.intervals = scan_intervals(all_constraints[i]);
            report.per_frequency[i] = std::move(scan);
        } catch (...) {
#pragma omp critical
            failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    report.intersection = report.per_frequency.front().intervals;
    for (std::size_t i = 1; i < report.per_frequency.size(); ++i) {
        report.intersection =
            intersect_interval_sets(report.intersection, report.per_frequency[i].intervals);
    }
    report.compliant = !report.intersection.empty();

    if (report.compliant) {
        auto agrees_everywhere = [&](double deg) {
            for (const auto& constraints : all_constraints) {
                if (!direction_agrees(deg, constraints)) return false;
            }
            return true;
        };
        for (const auto& [x, y] : canonical_directions()) {
            const double deg = std::atan2(y, x) * 180.0 / pi;
            if (agrees_everywhere(deg)) {
                report.direction_deg = deg;
                report.direction_xy = std::make_pair(x, y);
                break;
            }
        }
        if (!report.direction_deg) {
            const auto widest = std::max_element(
                report.intersection.begin(), report.intersection.end(),
                [](const AngleInterval& a, const AngleInterval& b) {
                    return a.width() < b.width();
                });
            const double deg = 0.5 * (widest->lo_deg + widest->hi_deg);
            report.direction_deg = deg;
            report.direction_xy =
                std::make_pair(std::cos(deg_to_rad(deg)), std::sin(deg_to_rad(deg)));
        }
    } else {
        const UtilityMatrix identity = UtilityMatrix::identity();
        const std::size_t witness_draws = std::max<std::size_t>(10'000, samples);
        for (std::size_t i = 0; i < frequency_grid.size(); ++i) {
            report.witness = find_reversal_witness(metric, identity, frequency_grid[i],
                                                   witness_draws, seed + 1000u + i);
            if (report.witness) break;
        }
    }
    return report;
}

} // namespace utilrank
