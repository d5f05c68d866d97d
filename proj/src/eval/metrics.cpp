// SPDX-License-Identifier: Apache-2.0
#include "ddi/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ddi/common/error.hpp"

namespace ddi::eval {

namespace {

double ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

}  // namespace

MetricsReport computeMetrics(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (truth.empty()) fail(ErrorCode::kEmptyInput, "metrics need at least one sample");
  if (predicted.size() != truth.size()) fail(ErrorCode::kShapeMismatch, "one prediction per label required");
  std::map<int, ClassScores> classes;
  for (int y : truth) classes[y].label = y;
  int correct = 0;
  std::map<int, int> true_positive;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    classes[truth[i]].support++;
    if (auto it = classes.find(predicted[i]); it != classes.end()) it->second.predicted++;
    if (predicted[i] == truth[i]) {
      ++correct;
      true_positive[truth[i]]++;
    }
  }
  MetricsReport report;
  report.samples = static_cast<int>(truth.size());
  report.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  for (auto& [label, c] : classes) {
    const double tp = true_positive[label];
    c.precision = ratio(tp, c.predicted);
    c.recall = ratio(tp, c.support);
    c.f1 = ratio(2 * c.precision * c.recall, c.precision + c.recall);
    report.macro_precision += c.precision;
    report.macro_recall += c.recall;
    report.macro_f1 += c.f1;
    report.per_class.push_back(c);
  }
  const double k = static_cast<double>(classes.size());
  report.macro_precision /= k;
  report.macro_recall /= k;
  report.macro_f1 /= k;
  return report;
}

nlohmann::json MetricsReport::toJson() const {
  nlohmann::ordered_json j;
  j["samples"] = samples;
  j["accuracy"] = accuracy;
  j["macro_f1"] = macro_f1;
  j["macro_recall"] = macro_recall;
  j["macro_precision"] = macro_precision;
  j["per_class"] = nlohmann::ordered_json::array();
  for (const auto& c : per_class) {
    j["per_class"].push_back({{"label", c.label},
                              {"support", c.support},
                              {"predicted", c.predicted},
                              {"precision", c.precision},
                              {"recall", c.recall},
                              {"f1", c.f1}});
  }
  return nlohmann::json::parse(j.dump());
}

MetricsReport MetricsReport::fromJson(const nlohmann::json& j) {
  MetricsReport r;
  try {
    r.samples = j.value("samples", 0);
    r.accuracy = j.at("accuracy").get<double>();
    r.macro_f1 = j.at("macro_f1").get<double>();
    r.macro_recall = j.at("macro_recall").get<double>();
    r.macro_precision = j.at("macro_precision").get<double>();
    for (const auto& c : j.value("per_class", nlohmann::json::array())) {
      r.per_class.push_back({c.at("label").get<int>(), c.at("support").get<int>(), c.at("predicted").get<int>(),
                             c.at("precision").get<double>(), c.at("recall").get<double>(), c.at("f1").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, std::string("metrics report: ") + e.what());
  }
  return r;
}

std::vector<MetricSummary> aggregateRuns(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) fail(ErrorCode::kEmptyInput, "aggregate needs at least one report");
  std::vector<MetricSummary> out;
  auto summarize = [&](const std::string& name, double MetricsReport::*field) {
    // Sorted so the result does not depend on report order.
    std::vector<double> values;
    for (const auto& r : reports) values.push_back(r.*field);
    std::sort(values.begin(), values.end());
    double sum = 0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = reports.size() > 1 ? std::sqrt(ss / static_cast<double>(reports.size() - 1)) : 0.0;
    out.push_back({name, mean, sd});
  };
  summarize("accuracy", &MetricsReport::accuracy);
  summarize("macro_f1", &MetricsReport::macro_f1);
  summarize("macro_recall", &MetricsReport::macro_recall);
  summarize("macro_precision", &MetricsReport::macro_precision);
  return out;
}

}  // namespace ddi::eval
