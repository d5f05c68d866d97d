// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace ddi::eval {

struct ClassScores {
  int label = 0;
  int support = 0;    // true samples of this class
  int predicted = 0;  // samples predicted as this class
  double precision = 0, recall = 0, f1 = 0;
};

struct MetricsReport {
  int samples = 0;
  double accuracy = 0, macro_f1 = 0, macro_recall = 0, macro_precision = 0;
  std::vector<ClassScores> per_class;  // classes present in the ground truth, ascending

  nlohmann::json toJson() const;
  static MetricsReport fromJson(const nlohmann::json& j);
};

//! Accuracy and macro precision/recall/F1 over the classes present in
//! `truth`; a ratio with zero denominator counts as 0. Throws kEmptyInput.
MetricsReport computeMetrics(const std::vector<int>& predicted, const std::vector<int>& truth);

struct MetricSummary {
  std::string name;
  double mean = 0;
  double std = 0;  // sample standard deviation; 0 for a single run
};

//! Mean and sample standard deviation of the four headline metrics.
std::vector<MetricSummary> aggregateRuns(const std::vector<MetricsReport>& reports);

}  // namespace ddi::eval
