// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ddi/nn/parameter.hpp"

namespace ddi::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-6;  // L2 penalty added to the gradient
};

//! Adam with bias correction; weight decay is applied as g += wd * p before
//! the moment updates. Moments are keyed by parameter name.
template <typename T>
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  void step(const ParameterList<T>& params);

  const AdamConfig& config() const { return config_; }
  std::int64_t steps() const { return step_; }

  struct Moments {
    Matrix<T> m, v;
  };
  std::map<std::string, Moments>& state() { return state_; }
  const std::map<std::string, Moments>& state() const { return state_; }
  void setSteps(std::int64_t s) { step_ = s; }

 private:
  AdamConfig config_;
  std::int64_t step_ = 0;
  std::map<std::string, Moments> state_;
};

}  // namespace ddi::nn
