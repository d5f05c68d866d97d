// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ddi/nn/layers.hpp"

namespace ddi::model {

using nn::Matrix;

//! Probability floor applied to the true-class probability inside the log.
inline constexpr double kProbabilityFloor = 1e-12;

struct Prediction {
  std::vector<double> probs;
  int label = 0;
};

//! logits = MLP(z + z W_rho + b_rho), MLP = Linear -> ReLU -> Linear.
template <typename T>
class PredictionHead {
 public:
  PredictionHead(int hidden, int num_classes, Rng& rng);

  Matrix<T> forward(const Matrix<T>& z);
  Matrix<T> backward(const Matrix<T>& dlogits);
  void collect(nn::ParameterList<T>& out);

  nn::Linear<T> residual, fc1, fc2;

 private:
  nn::Relu<T> relu_;
};

//! Probabilities and argmax labels, one per row of logits.
template <typename T>
std::vector<Prediction> predictions(const Matrix<T>& logits);

//! Mean negative log-likelihood of the labels under probs.
//! Throws kIndexOutOfRange for labels outside [0, classes).
template <typename T>
double crossEntropy(const Matrix<T>& probs, const std::vector<int>& labels);

//! Gradient of crossEntropy(softmax(logits)) with respect to the logits.
template <typename T>
Matrix<T> crossEntropyLogitGrad(const Matrix<T>& probs, const std::vector<int>& labels);

}  // namespace ddi::model
