#include "utilrank/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace utilrank {

namespace {

void require_normalized(const ConfusionMatrix& c) {
    if (!c.is_normalized()) {
        throw std::invalid_argument("metric requires a normalized confusion matrix");
    }
}

void require_both_classes(const ConfusionMatrix& c) {
    if (c.f0() <= 0.0 || c.f1() <= 0.0) {
        throw std::domain_error("metric undefined: test set contains only one class");
    }
}

} // namespace

double accuracy(const ConfusionMatrix& c) {
    require_normalized(c);
    return c.c00() + c.c11();
}

double true_positive_rate(const ConfusionMatrix& c) {
    require_normalized(c);
    if (c.f0() <= 0.0) {
        throw std::domain_error("true-positive rate undefined: no class-0 items");
    }
    return c.c00() / c.f0();
}

double true_negative_rate(const ConfusionMatrix& c) {
    require_normalized(c);
    if (c.f1() <= 0.0) {
        throw std::domain_error("true-negative rate undefined: no class-1 items");
    }
    return c.c11() / c.f1();
}

double precision(const ConfusionMatrix& c) {
    require_normalized(c);
    const double denom = c.c00() - c.c11() + c.f1(); // = C00 + C01, predicted-0 mass
    if (denom <= 0.0) return 0.0;
    return c.c00() / denom;
}

double f_beta(const ConfusionMatrix& c, double beta) {
    require_normalized(c);
    if (!(beta > 0.0)) {
        throw std::invalid_argument("beta must be positive");
    }
    if (beta == 1.0) {
        const double denom = c.c00() - c.c11() + 1.0;
        if (denom <= 0.0) return 0.0;
        return 2.0 * c.c00() / denom;
    }
    require_both_classes(c);
    const double p = precision(c);
    const double r = true_positive_rate(c);
    const double denom = beta * beta * p + r;
    if (denom <= 0.0) return 0.0;
    return (1.0 + beta * beta) * p * r / denom;
}

double f1_score(const ConfusionMatrix& c) { return f_beta(c, 1.0); }

double matthews_cc(const ConfusionMatrix& c) {
    require_normalized(c);
    const double f0 = c.f0();
    const double f1 = c.f1();
    const double radicand = f0 * f1 * (f1 + c.c00() - c.c11()) * (f0 + c.c11() - c.c00());
    if (radicand <= 0.0) return 0.0;
    return (f1 * c.c00() + f0 * c.c11() - f0 * f1) / std::sqrt(radicand);
}

double fowlkes_mallows(const ConfusionMatrix& c) {
    require_normalized(c);
    const double radicand = c.f0() * (c.f1() + c.c00() - c.c11());
    if (radicand <= 0.0) return 0.0;
    return c.c00() / std::sqrt(radicand);
}

double balanced_accuracy(const ConfusionMatrix& c) {
    require_normalized(c);
    require_both_classes(c);
    return c.c00() / (2.0 * c.f0()) + c.c11() / (2.0 * c.f1());
}

const std::vector<MetricDescriptor>& metric_registry() {
    static const std::vector<MetricDescriptor> registry = [] {
        std::vector<MetricDescriptor> r;
        r.push_back({"accuracy", [](const ConfusionMatrix& c) { return accuracy(c); },
                     true, LinearWitness{1.0, 1.0, "1", "0"}});
        r.push_back({"balanced_accuracy",
                     [](const ConfusionMatrix& c) { return balanced_accuracy(c); },
                     false, std::nullopt});
        r.push_back({"precision", [](const ConfusionMatrix& c) { return precision(c); },
                     false, std::nullopt});
        r.push_back({"recall",
                     [](const ConfusionMatrix& c) { return true_positive_rate(c); },
                     true, LinearWitness{1.0, 0.0, "1/f0", "0"}});
        r.push_back({"specificity",
                     [](const ConfusionMatrix& c) { return true_negative_rate(c); },
                     true, LinearWitness{0.0, 1.0, "1/f1", "0"}});
        r.push_back({"f1", [](const ConfusionMatrix& c) { return f1_score(c); },
                     false, std::nullopt});
        r.push_back({"mcc", [](const ConfusionMatrix& c) { return matthews_cc(c); },
                     false, std::nullopt});
        r.push_back({"fowlkes_mallows",
                     [](const ConfusionMatrix& c) { return fowlkes_mallows(c); },
                     false, std::nullopt});
        return r;
    }();
    return registry;
}

const MetricDescriptor* find_metric(std::string_view name) {
    for (const auto& metric : metric_registry()) {
        if (metric.name == name) return &metric;
    }
    return nullptr;
}

std::vector<std::string> metric_names() {
    std::vector<std::string> names;
    for (const auto& metric : metric_registry()) names.push_back(metric.name);
    return names;
}

MetricDescriptor yield_as_metric(const UtilityMatrix& utilities) {
    if (!utilities.is_feasible()) {
        throw std::invalid_argument("yield_as_metric requires a feasible utility matrix");
    }
    MetricDescriptor descriptor;
    descriptor.name = "utility_yield";
    descriptor.score = [utilities](const ConfusionMatrix& c) {
        return utility_yield(utilities, c);
    };
    descriptor.declared_compliant = true;
    descriptor.witness = LinearWitness{utilities.correct_margin(0),
                                       utilities.correct_margin(1),
                                       "1", "f0*U10 + f1*U01"};
    return descriptor;
}

} // namespace utilrank
