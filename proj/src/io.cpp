#include "utilrank/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace utilrank {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& message) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": " + message);
}

int parse_label(const std::string& path, std::size_t line_no, const std::string& field) {
    if (field == "0") return 0;
    if (field == "1") return 1;
    parse_fail(path, line_no, "label must be 0 or 1, got '" + field + "'");
}

double parse_real(const std::string& path, std::size_t line_no, const std::string& field) {
    try {
        std::size_t consumed = 0;
        const double value = std::stod(field, &consumed);
        if (consumed != field.size()) throw std::invalid_argument(field);
        return value;
    } catch (const std::exception&) {
        parse_fail(path, line_no, "expected a number, got '" + field + "'");
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open input file: " + path);
    return in;
}

void expect_header(const std::string& path, std::ifstream& in,
                   const std::vector<std::string>& names) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file, header row required");
    const auto fields = split_csv_line(line);
    if (fields != names) {
        std::string expected;
        for (std::size_t i = 0; i < names.size(); ++i) {
            expected += (i ? "," : "") + names[i];
        }
        parse_fail(path, 1, "header row must be '" + expected + "'");
    }
}

json json_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

UtilityMatrix matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() ||
        j[0].size() != 2 || j[1].size() != 2) {
        throw ConfigError(where + ": utility matrix must be a 2x2 array of numbers");
    }
    try {
        const UtilityMatrix u(j[0][0].get<double>(), j[0][1].get<double>(),
                              j[1][0].get<double>(), j[1][1].get<double>());
        if (!u.is_feasible()) {
            throw ConfigError(where + ": infeasible utility matrix; correct classification "
                                      "must not score below misclassification of the same "
                                      "true class");
        }
        return u;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

json confusion_to_json(const ConfusionMatrix& c) {
    json j;
    j["c00"] = c.c00();
    j["c01"] = c.c01();
    j["c10"] = c.c10();
    j["c11"] = c.c11();
    j["f0"] = c.f0();
    j["f1"] = c.f1();
    return j;
}

json estimate_to_json(const MisrankEstimate& estimate) {
    json j;
    j["misranked"] = estimate.misranked;
    j["pairs"] = estimate.pairs;
    j["fraction"] = estimate.fraction;
    j["std_error"] = estimate.std_error;
    return j;
}

} // namespace

LabeledPredictions read_predictions_csv(const std::string& path) {
    auto in = open_input(path);
    expect_header(path, in, {"true_label", "predicted_label"});
    LabeledPredictions out;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2) parse_fail(path, line_no, "expected 2 fields");
        out.true_labels.push_back(parse_label(path, line_no, fields[0]));
        out.predicted_labels.push_back(parse_label(path, line_no, fields[1]));
    }
    if (out.true_labels.empty()) throw ParseError(path + ": no data rows");
    return out;
}

LabeledScores read_scores_csv(const std::string& path) {
    auto in = open_input(path);
    expect_header(path, in, {"true_label", "score"});
    LabeledScores out;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2) parse_fail(path, line_no, "expected 2 fields");
        out.true_labels.push_back(parse_label(path, line_no, fields[0]));
        out.scores.push_back(parse_real(path, line_no, fields[1]));
    }
    if (out.true_labels.empty()) throw ParseError(path + ": no data rows");
    return out;
}

ConfusionMatrix confusion_from_predictions(const LabeledPredictions& predictions) {
    std::uint64_t counts[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < predictions.true_labels.size(); ++i) {
        counts[predictions.predicted_labels[i]][predictions.true_labels[i]] += 1;
    }
    return ConfusionMatrix::from_counts(counts[0][0], counts[0][1], counts[1][0], counts[1][1]);
}

RocCurve read_curve_csv(const std::string& path) {
    auto in = open_input(path);
    expect_header(path, in, {"f", "t"});
    std::vector<RocPoint> points;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2) parse_fail(path, line_no, "expected 2 fields");
        points.push_back(
            {parse_real(path, line_no, fields[0]), parse_real(path, line_no, fields[1])});
    }
    try {
        return RocCurve(std::move(points));
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string curve_to_csv(const RocCurve& curve) {
    std::string out = "f,t\n";
    for (const auto& p : curve.points()) {
        out += format_full(p.f) + "," + format_full(p.t) + "\n";
    }
    return out;
}

UtilityMatrix UtilityConfig::effective_utilities() const {
    if (utilities) return *utilities;
    if (mixture) return expected_utility_matrix(*mixture);
    throw ConfigError("config provides neither 'utilities' nor 'mixture'");
}

UtilityConfig read_utility_config(const std::string& path) {
    const json j = json_from_file(path);
    if (!j.is_object()) throw ConfigError(path + ": top level must be an object");
    UtilityConfig config;
    try {
        if (j.contains("utilities")) {
            config.utilities = matrix_from_json(j.at("utilities"), path);
        }
        if (j.contains("mixture")) {
            std::vector<std::pair<double, UtilityMatrix>> components;
            for (const auto& item : j.at("mixture")) {
                if (!item.is_object() || !item.contains("weight") ||
                    !item.contains("utilities")) {
                    throw ConfigError(path +
                                      ": mixture items need 'weight' and 'utilities'");
                }
                components.emplace_back(item.at("weight").get<double>(),
                                        matrix_from_json(item.at("utilities"), path));
            }
            config.mixture = UtilityMixture(std::move(components));
        }
        if (j.contains("balance")) config.balance = j.at("balance").get<double>();
        if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("experiment")) {
            const auto& e = j.at("experiment");
            if (e.contains("prior")) {
                config.prior = prior_from_string(e.at("prior").get<std::string>());
            }
            if (e.contains("sigmas")) {
                config.sigmas = e.at("sigmas").get<std::vector<double>>();
            }
            if (e.contains("pairs")) config.pairs = e.at("pairs").get<std::uint64_t>();
            if (e.contains("metrics")) {
                config.metrics = e.at("metrics").get<std::vector<std::string>>();
            }
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (config.balance && !(*config.balance > 0.0 && *config.balance < 1.0)) {
        throw ConfigError(path + ": balance must lie strictly between 0 and 1");
    }
    return config;
}

UtilityPriorKind prior_from_string(const std::string& name) {
    if (name == "uniform") return UtilityPriorKind::uniform;
    if (name == "gaussian") return UtilityPriorKind::gaussian;
    throw ConfigError("unknown prior '" + name + "', expected 'uniform' or 'gaussian'");
}

std::string prior_to_string(UtilityPriorKind kind) {
    return kind == UtilityPriorKind::uniform ? "uniform" : "gaussian";
}

std::string format_full(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::string experiment_report_json(const ExperimentReport& report,
                                   std::optional<double> linear_fit_r2) {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "simulate_report";
    j["pairs"] = report.pairs;
    j["seed"] = report.seed;
    j["prior"] = prior_to_string(report.prior);
    j["metrics"] = json::array();
    for (const auto& estimate : report.metric_estimates) {
        json row = estimate_to_json(estimate);
        row["name"] = estimate.evaluator;
        j["metrics"].push_back(row);
    }
    j["noisy_utility"] = json::array();
    for (std::size_t k = 0; k < report.sigmas.size(); ++k) {
        json row = estimate_to_json(report.sigma_estimates[k]);
        row["sigma"] = report.sigmas[k];
        j["noisy_utility"].push_back(row);
    }
    if (linear_fit_r2) j["linear_fit_r2"] = *linear_fit_r2;
    return j.dump(2) + "\n";
}

std::string experiment_report_csv(const ExperimentReport& report) {
    std::string out = "evaluator,sigma,misranked,pairs,fraction,std_error\n";
    for (const auto& estimate : report.metric_estimates) {
        out += estimate.evaluator + ",," + std::to_string(estimate.misranked) + "," +
               std::to_string(estimate.pairs) + "," + format_full(estimate.fraction) + "," +
               format_full(estimate.std_error) + "\n";
    }
    for (std::size_t k = 0; k < report.sigmas.size(); ++k) {
        const auto& estimate = report.sigma_estimates[k];
        out += "utility_sigma," + format_full(report.sigmas[k]) + "," +
               std::to_string(estimate.misranked) + "," + std::to_string(estimate.pairs) +
               "," + format_full(estimate.fraction) + "," + format_full(estimate.std_error) +
               "\n";
    }
    return out;
}

std::string scatter_csv(const std::vector<ScatterPoint>& points) {
    std::string out = "yield,score,pair_id,reversed_flag\n";
    for (const auto& p : points) {
        out += format_full(p.yield) + "," + format_full(p.score) + "," +
               std::to_string(p.pair_id) + "," + (p.reversed ? "1" : "0") + "\n";
    }
    return out;
}

std::string scatter_svg(const std::vector<ScatterPoint>& points, const std::string& x_label,
                        const std::string& y_label) {
    const double width = 640.0, height = 480.0, margin = 48.0;
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    if (!points.empty()) {
        x_lo = x_hi = points.front().yield;
        y_lo = y_hi = points.front().score;
        for (const auto& p : points) {
            x_lo = std::min(x_lo, p.yield);
            x_hi = std::max(x_hi, p.yield);
            y_lo = std::min(y_lo, p.score);
            y_hi = std::max(y_hi, p.score);
        }
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    if (y_hi <= y_lo) y_hi = y_lo + 1.0;
    auto px = [&](double x) {
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin);
    };
    auto py = [&](double y) {
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin);
    };
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
                      "height=\"480\" viewBox=\"0 0 640 480\">\n";
    svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  margin, height - margin, width - margin, height - margin);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  margin, height - margin, margin, margin);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">%s</text>\n", width / 2 - 30,
                  height - 12, x_label.c_str());
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"14\" y=\"%.1f\" font-size=\"12\" transform=\"rotate(-90 14 "
                  "%.1f)\">%s</text>\n",
                  height / 2, height / 2, y_label.c_str());
    svg += buf;
    for (const auto& p : points) {
        if (p.reversed) {
            const double cx = px(p.yield), cy = py(p.score);
            std::snprintf(buf, sizeof(buf),
                          "<polygon points=\"%.1f,%.1f %.1f,%.1f %.1f,%.1f\" "
                          "fill=\"crimson\"/>\n",
                          cx, cy - 4.5, cx - 4.0, cy + 3.5, cx + 4.0, cy + 3.5);
        } else {
            std::snprintf(buf, sizeof(buf),
                          "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"2\" fill=\"steelblue\" "
                          "fill-opacity=\"0.6\"/>\n",
                          px(p.yield), py(p.score));
        }
        svg += buf;
    }
    svg += "</svg>\n";
    return svg;
}

std::string compliance_reports_json(const std::vector<ComplianceReport>& reports) {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "compliance_report";
    j["results"] = json::array();
    for (const auto& report : reports) {
        json r;
        r["metric"] = report.metric;
        r["compliant"] = report.compliant;
        r["samples_per_frequency"] = report.samples_per_frequency;
        r["seed"] = report.seed;
        r["per_frequency"] = json::array();
        for (std::size_t i = 0; i < report.frequencies.size(); ++i) {
            json f;
            f["f0"] = report.frequencies[i];
            f["intervals"] = json::array();
            for (const auto& interval : report.per_frequency[i].intervals) {
                f["intervals"].push_back(json::array({interval.lo_deg, interval.hi_deg}));
            }
            f["pairs_used"] = report.per_frequency[i].pairs_used;
            f["pairs_rejected"] = report.per_frequency[i].pairs_rejected;
            r["per_frequency"].push_back(f);
        }
        r["intersection"] = json::array();
        for (const auto& interval : report.intersection) {
            r["intersection"].push_back(json::array({interval.lo_deg, interval.hi_deg}));
        }
        if (report.direction_deg) {
            r["direction_deg"] = *report.direction_deg;
            r["direction"] = json::array(
                {report.direction_xy->first, report.direction_xy->second});
        }
        if (report.witness) {
            json w;
            w["f0"] = report.witness->f0;
            w["first"] = confusion_to_json(report.witness->first);
            w["second"] = confusion_to_json(report.witness->second);
            w["metric_scores"] =
                json::array({report.witness->metric_first, report.witness->metric_second});
            w["utility_yields"] =
                json::array({report.witness->yield_first, report.witness->yield_second});
            r["witness"] = w;
        }
        j["results"].push_back(r);
    }
    return j.dump(2) + "\n";
}

std::string witness_csv(const std::vector<ComplianceReport>& reports) {
    std::string out = "metric,f0,member,c00,c01,c10,c11,metric_score,utility_yield\n";
    for (const auto& report : reports) {
        if (!report.witness) continue;
        const auto& w = *report.witness;
        const auto row = [&](const char* member, const ConfusionMatrix& c, double score,
                             double yield) {
            return report.metric + "," + format_full(w.f0) + "," + member + "," +
                   format_full(c.c00()) + "," + format_full(c.c01()) + "," +
                   format_full(c.c10()) + "," + format_full(c.c11()) + "," +
                   format_full(score) + "," + format_full(yield) + "\n";
        };
        out += row("first", w.first, w.metric_first, w.yield_first);
        out += row("second", w.second, w.metric_second, w.yield_second);
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << contents;
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace utilrank
