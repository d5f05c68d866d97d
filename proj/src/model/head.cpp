// SPDX-License-Identifier: Apache-2.0
#include "ddi/model/head.hpp"

#include <algorithm>
#include <cmath>

#include "ddi/common/error.hpp"

namespace ddi::model {

template <typename T>
PredictionHead<T>::PredictionHead(int hidden, int num_classes, Rng& rng)
    : residual("head.residual", hidden, hidden, rng),
      fc1("head.fc1", hidden, hidden, rng),
      fc2("head.fc2", hidden, num_classes, rng) {}

template <typename T>
Matrix<T> PredictionHead<T>::forward(const Matrix<T>& z) {
  const Matrix<T> r = z + residual.forward(z);
  return fc2.forward(relu_.forward(fc1.forward(r)));
}

template <typename T>
Matrix<T> PredictionHead<T>::backward(const Matrix<T>& dlogits) {
  const Matrix<T> dr = fc1.backward(relu_.backward(fc2.backward(dlogits)));
  return dr + residual.backward(dr);
}

template <typename T>
void PredictionHead<T>::collect(nn::ParameterList<T>& out) {
  residual.collect(out);
  fc1.collect(out);
  fc2.collect(out);
}

template <typename T>
std::vector<Prediction> predictions(const Matrix<T>& logits) {
  const Matrix<T> probs = nn::softmaxRows(logits);
  std::vector<Prediction> out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    auto& p = out[static_cast<std::size_t>(i)];
    p.probs.assign(probs.row(i).data(), probs.row(i).data() + probs.cols());
    p.label = static_cast<int>(std::max_element(p.probs.begin(), p.probs.end()) - p.probs.begin());
  }
  return out;
}

namespace {

void checkLabels(Eigen::Index rows, Eigen::Index classes, const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != rows) fail(ErrorCode::kShapeMismatch, "one label per row required");
  if (rows == 0) fail(ErrorCode::kEmptyInput, "cross-entropy of an empty batch");
  for (int y : labels) {
    if (y < 0 || y >= classes) fail(ErrorCode::kIndexOutOfRange, "label " + std::to_string(y) + " out of range");
  }
}

}  // namespace

template <typename T>
double crossEntropy(const Matrix<T>& probs, const std::vector<int>& labels) {
  checkLabels(probs.rows(), probs.cols(), labels);
  double total = 0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    total -= std::log(std::max(static_cast<double>(probs(i, labels[static_cast<std::size_t>(i)])), kProbabilityFloor));
  }
  return total / static_cast<double>(probs.rows());
}

template <typename T>
Matrix<T> crossEntropyLogitGrad(const Matrix<T>& probs, const std::vector<int>& labels) {
  checkLabels(probs.rows(), probs.cols(), labels);
  Matrix<T> g = probs;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) g(i, labels[static_cast<std::size_t>(i)]) -= T(1);
  return g / static_cast<T>(probs.rows());
}

template class PredictionHead<float>;
template class PredictionHead<double>;
template std::vector<Prediction> predictions(const Matrix<float>&);
template std::vector<Prediction> predictions(const Matrix<double>&);
template double crossEntropy(const Matrix<float>&, const std::vector<int>&);
template double crossEntropy(const Matrix<double>&, const std::vector<int>&);
template Matrix<float> crossEntropyLogitGrad(const Matrix<float>&, const std::vector<int>&);
template Matrix<double> crossEntropyLogitGrad(const Matrix<double>&, const std::vector<int>&);

}  // namespace ddi::model
