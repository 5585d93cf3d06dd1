#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "utilrank/compliance.hpp"
#include "utilrank/metrics.hpp"
#include "utilrank/sampling.hpp"

using namespace utilrank;
using namespace testutil;

namespace {

bool contains_angle(const std::vector<AngleInterval>& intervals, double deg,
                    double slack = 1e-9) {
    for (const auto& interval : intervals) {
        if (deg >= interval.lo_deg - slack && deg <= interval.hi_deg + slack) return true;
    }
    return false;
}

// Brute-force oracle: enumerate a deterministic grid of confusion matrices at
// fixed f0 and test every half-degree direction against every pair ordering.
// Completely independent of the sampled scan in the library.
bool any_direction_fits_on_grid(const MetricDescriptor& metric, double f0) {
    std::vector<ConfusionMatrix> grid;
    for (int i = 0; i <= 10; ++i) {
        for (int j = 0; j <= 10; ++j) {
            grid.push_back(confusion_from_rates(f0, 0.5 + 0.05 * i, 0.5 + 0.05 * j));
        }
    }
    for (int k = 0; k <= 180; ++k) {
        const double rad = (0.5 * k) * 3.14159265358979323846 / 180.0;
        const double cx = std::cos(rad), cy = std::sin(rad);
        bool ok = true;
        for (std::size_t a = 0; a < grid.size() && ok; ++a) {
            for (std::size_t b = a + 1; b < grid.size() && ok; ++b) {
                const double dm = metric.score(grid[b]) - metric.score(grid[a]);
                const double dl = cx * (grid[b].c00() - grid[a].c00()) +
                                  cy * (grid[b].c11() - grid[a].c11());
                if (std::abs(dm) < 1e-9 || std::abs(dl) < 1e-9) continue;
                if ((dm > 0) != (dl > 0)) ok = false;
            }
        }
        if (ok) return true;
    }
    return false;
}

} // namespace

TEST_SUITE_BEGIN("compliance");

TEST_CASE("accuracy admits the diagonal direction at any frequency") {
    for (double f0 : {0.2, 0.5, 0.8}) {
        const auto scan = admissible_directions(*find_metric("accuracy"), f0, 500, 7);
        CHECK(scan.pairs_used == 500);
        CHECK(contains_angle(scan.intervals, 45.0));
    }
}

TEST_CASE("recall admits the C00 axis, specificity the C11 axis") {
    for (double f0 : {0.2, 0.5, 0.8}) {
        CHECK(contains_angle(
            admissible_directions(*find_metric("recall"), f0, 500, 11).intervals, 0.0));
        CHECK(contains_angle(
            admissible_directions(*find_metric("specificity"), f0, 500, 11).intervals, 90.0));
    }
}

TEST_CASE("precision admits no direction at f0 = 0.5") {
    const auto scan = admissible_directions(*find_metric("precision"), 0.5, 2000, 13);
    CHECK(scan.intervals.empty());
    // Cross-checked by exhaustive grid enumeration.
    CHECK_FALSE(any_direction_fits_on_grid(*find_metric("precision"), 0.5));
    CHECK(any_direction_fits_on_grid(*find_metric("accuracy"), 0.5));
    CHECK(any_direction_fits_on_grid(*find_metric("balanced_accuracy"), 0.3));
}

TEST_CASE("scan rejects invalid arguments") {
    CHECK_THROWS_AS(admissible_directions(*find_metric("accuracy"), 0.0, 500, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(admissible_directions(*find_metric("accuracy"), 0.5, 10, 1),
                    std::invalid_argument);
}

TEST_CASE("verdicts match the declared compliance of every registry metric") {
    for (const auto& metric : metric_registry()) {
        const auto report =
            compliance_verdict(metric, default_frequency_grid(), 1000, 2024);
        CHECK(report.compliant == metric.declared_compliant);
        if (report.compliant) {
            CHECK(report.direction_deg.has_value());
        } else {
            REQUIRE(report.witness.has_value());
            // The witness really is misranked against the identity yield.
            const auto& w = *report.witness;
            const double dm = w.metric_second - w.metric_first;
            const double dy = w.yield_second - w.yield_first;
            CHECK(std::abs(dm) > 1e-6);
            CHECK(std::abs(dy) > 1e-6);
            CHECK((dm > 0) != (dy > 0));
        }
    }
}

TEST_CASE("balanced accuracy is linear per frequency but rotates") {
    const auto report = compliance_verdict(*find_metric("balanced_accuracy"),
                                           default_frequency_grid(), 1000, 31);
    CHECK_FALSE(report.compliant);
    for (std::size_t i = 0; i < report.frequencies.size(); ++i) {
        REQUIRE_FALSE(report.per_frequency[i].intervals.empty());
        // The admissible direction tracks atan(f0/f1).
        const double f0 = report.frequencies[i];
        const double expected =
            std::atan2(f0, 1.0 - f0) * 180.0 / 3.14159265358979323846;
        CHECK(contains_angle(report.per_frequency[i].intervals, expected, 1e-6));
    }
    CHECK(report.intersection.empty());
}

TEST_CASE("compliant metrics snap to exact canonical directions") {
    const auto acc = compliance_verdict(*find_metric("accuracy"), default_frequency_grid(),
                                        1000, 47);
    CHECK(acc.direction_xy->first == 1.0);
    CHECK(acc.direction_xy->second == 1.0);
    const auto rec = compliance_verdict(*find_metric("recall"), default_frequency_grid(),
                                        1000, 47);
    CHECK(rec.direction_xy->first == 1.0);
    CHECK(rec.direction_xy->second == 0.0);
    const auto spec = compliance_verdict(*find_metric("specificity"),
                                         default_frequency_grid(), 1000, 47);
    CHECK(spec.direction_xy->first == 0.0);
    CHECK(spec.direction_xy->second == 1.0);
}

TEST_CASE("reported directions reproduce the ordering on fresh pairs") {
    for (const char* name : {"accuracy", "recall", "specificity"}) {
        const auto report = compliance_verdict(*find_metric(name), default_frequency_grid(),
                                               1000, 53);
        REQUIRE(report.compliant);
        const double rad = *report.direction_deg * 3.14159265358979323846 / 180.0;
        const double cx = std::cos(rad), cy = std::sin(rad);
        for (double f0 : report.frequencies) {
            Rng rng(987'654 + static_cast<std::uint64_t>(f0 * 1000));
            std::size_t disagreements = 0;
            for (int i = 0; i < 10'000; ++i) {
                const ConfusionMatrix a = sample_confusion(f0, rng);
                const ConfusionMatrix b = sample_confusion(f0, rng);
                const double dm = find_metric(name)->score(b) - find_metric(name)->score(a);
                const double dl = cx * (b.c00() - a.c00()) + cy * (b.c11() - a.c11());
                if (std::abs(dm) < 1e-9 || std::abs(dl) < 1e-9) continue;
                if ((dm > 0) != (dl > 0)) ++disagreements;
            }
            CHECK(disagreements == 0);
        }
    }
}

TEST_CASE("verdicts are deterministic given the seed") {
    const auto first = compliance_verdict(*find_metric("mcc"), default_frequency_grid(),
                                          500, 61);
    const auto second = compliance_verdict(*find_metric("mcc"), default_frequency_grid(),
                                           500, 61);
    CHECK(first.compliant == second.compliant);
    REQUIRE(first.per_frequency.size() == second.per_frequency.size());
    for (std::size_t i = 0; i < first.per_frequency.size(); ++i) {
        REQUIRE(first.per_frequency[i].intervals.size() ==
                second.per_frequency[i].intervals.size());
        for (std::size_t k = 0; k < first.per_frequency[i].intervals.size(); ++k) {
            CHECK(first.per_frequency[i].intervals[k].lo_deg ==
                  second.per_frequency[i].intervals[k].lo_deg);
            CHECK(first.per_frequency[i].intervals[k].hi_deg ==
                  second.per_frequency[i].intervals[k].hi_deg);
        }
    }
}

TEST_CASE("verdict needs at least three distinct frequencies") {
    CHECK_THROWS_AS(compliance_verdict(*find_metric("accuracy"), {0.5, 0.5, 0.5}, 500, 1),
                    std::invalid_argument);
}

TEST_CASE("witness search for F1 against the identity utilities succeeds") {
    const auto witness =
        find_reversal_witness(*find_metric("f1"), UtilityMatrix::identity(), 0.5, 20'000, 71);
    REQUIRE(witness.has_value());
    CHECK(witness->f0 == 0.5);
    const double dm = witness->metric_second - witness->metric_first;
    const double dy = witness->yield_second - witness->yield_first;
    CHECK((dm > 0) != (dy > 0));
}

TEST_CASE("no witness exists when metric and utilities agree exactly") {
    CHECK_FALSE(find_reversal_witness(*find_metric("accuracy"), UtilityMatrix::identity(),
                                      0.5, 20'000, 73)
                    .has_value());
    // Recall orders exactly like the [[1,0],[0,0]] yield on a fixed test set.
    CHECK_FALSE(find_reversal_witness(*find_metric("recall"), UtilityMatrix(1, 0, 0, 0),
                                      0.35, 20'000, 79)
                    .has_value());
}

TEST_CASE("witnesses exist for every non-compliant metric across a utility grid") {
    // Coarser grid than the acceptance run; the full 9x9 happens there.
    for (const char* name : {"precision", "f1", "mcc", "fowlkes_mallows",
                             "balanced_accuracy"}) {
        const auto& metric = *find_metric(name);
        for (double x : {-0.75, 0.0, 0.75}) {
            for (double y : {-0.75, 0.0, 0.75}) {
                const UtilityCoords coords{x, y};
                if (!coords.is_feasible()) continue;
                const UtilityMatrix u = coords_to_matrix(coords);
                bool found = false;
                for (double f0 : default_frequency_grid()) {
                    if (find_reversal_witness(metric, u, f0, 20'000,
                                              10'000 + static_cast<std::uint64_t>(
                                                           1000 * (x + 2) + 10 * (y + 2)))
                            .has_value()) {
                        found = true;
                        break;
                    }
                }
                CHECK_MESSAGE(found, name, " at coords (", x, ", ", y, ")");
            }
        }
    }
}

TEST_CASE("interval set intersection") {
    const std::vector<AngleInterval> a{{0.0, 10.0}, {20.0, 30.0}};
    const std::vector<AngleInterval> b{{5.0, 25.0}};
    const auto c = intersect_interval_sets(a, b);
    REQUIRE(c.size() == 2);
    CHECK(c[0].lo_deg == 5.0);
    CHECK(c[0].hi_deg == 10.0);
    CHECK(c[1].lo_deg == 20.0);
    CHECK(c[1].hi_deg == 25.0);
    CHECK(intersect_interval_sets(a, {{11.0, 19.0}}).empty());
}

TEST_SUITE_END();
