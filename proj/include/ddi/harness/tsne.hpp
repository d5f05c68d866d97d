// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddi/common/tensor.hpp"
#include "ddi/nn/parameter.hpp"

namespace ddi::harness {

struct TsneParams {
  double perplexity = 30;  // lowered to (n - 1) / 3 for small inputs
  int iterations = 1000;
  double learning_rate = 0;  // 0 picks max(n / exaggeration / 4, 50)
  double exaggeration = 12;
  int exaggeration_iterations = 250;
  std::uint64_t seed = 0;
};

//! Symmetrized input affinities p_ij = (p_j|i + p_i|j) / 2n, each row's
//! Gaussian bandwidth bisected to the requested perplexity.
nn::Matrix<double> jointAffinities(const nn::Matrix<double>& x, double perplexity);

//! Exact t-SNE to two dimensions. Throws kTooFewSamples for fewer than 2 rows.
nn::Matrix<double> tsne(const nn::Matrix<double>& x, const TsneParams& params = {});

//! The `low` rarest and `high` most frequent labels (ties broken by label),
//! returned ascending without duplicates.
std::vector<int> selectEvents(const std::vector<int>& labels, int low, int high);

//! Scatter plot, one colour per label.
std::string scatterSvg(const nn::Matrix<double>& points, const std::vector<int>& labels, const std::string& title);

}  // namespace ddi::harness
