#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "utilrank/core.hpp"

namespace utilrank {

// All formulas are written in terms of C00, C11 and the class frequencies
// f0 = C00 + C10, f1 = C01 + C11 of a normalized confusion matrix, using the
// identities C10 = f0 - C00 and C01 = f1 - C11.
//
// Conventions for degenerate inputs: scores whose denominator collapses
// because the classifier predicted nothing of one class (precision, F-beta,
// Fowlkes-Mallows, MCC) return 0. A test set that contains only one class
// (f0 equal to 0 or 1) cannot evaluate both classes, so rate-based metrics
// throw instead.

double accuracy(const ConfusionMatrix& c);

/// Recall; class 0 is "positive". C00 / f0.
double true_positive_rate(const ConfusionMatrix& c);

/// Specificity. C11 / f1.
double true_negative_rate(const ConfusionMatrix& c);

/// C00 / (C00 - C11 + f1).
double precision(const ConfusionMatrix& c);

/// F1 is 2*C00 / (C00 - C11 + 1); general beta uses the precision/recall form
/// (1 + b^2) p r / (b^2 p + r).
double f_beta(const ConfusionMatrix& c, double beta);
double f1_score(const ConfusionMatrix& c);

/// Matthews correlation coefficient in frequency form:
///   (f1*C00 + f0*C11 - f0*f1) / sqrt(f0 f1 (f1 + C00 - C11)(f0 + C11 - C00))
/// which is algebraically identical to the familiar count form
///   (TP*TN - FP*FN) / sqrt((TP+FP)(TP+FN)(TN+FP)(TN+FN)).
double matthews_cc(const ConfusionMatrix& c);

/// C00 / sqrt(f0 (f1 + C00 - C11)); equals sqrt(precision * recall).
double fowlkes_mallows(const ConfusionMatrix& c);

/// C00/(2 f0) + C11/(2 f1); the mean of TPR and TNR.
double balanced_accuracy(const ConfusionMatrix& c);

/// Witness that a metric is, up to a positive frequency-dependent scale a(.)
/// and offset b(.), the linear score X*C00 + Y*C11 with constants X, Y.
struct LinearWitness {
    double x_coefficient = 0.0;
    double y_coefficient = 0.0;
    std::string scale_expr;  // a(N, f0, f1)
    std::string offset_expr; // b(N, f0, f1)
};

struct MetricDescriptor {
    std::string name;
    std::function<double(const ConfusionMatrix&)> score;
    bool declared_compliant = false;
    std::optional<LinearWitness> witness;
};

/// The eight built-in metrics, in reporting order.
const std::vector<MetricDescriptor>& metric_registry();

/// Registry lookup by name; nullptr when unknown.
const MetricDescriptor* find_metric(std::string_view name);

std::vector<std::string> metric_names();

/// Wraps the utility yield of a fixed feasible matrix as a registry-style
/// descriptor. Always compliant, with witness X = U00 - U10, Y = U11 - U01.
MetricDescriptor yield_as_metric(const UtilityMatrix& utilities);

} // namespace utilrank
