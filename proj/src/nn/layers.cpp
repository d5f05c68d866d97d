// SPDX-License-Identifier: Apache-2.0
#include "ddi/nn/layers.hpp"

#include <cmath>

#include "ddi/common/error.hpp"

namespace ddi::nn {

template <typename T>
Linear<T>::Linear(const std::string& name, int in, int out, Rng& rng)
    : weight(name + ".weight", in, out), bias(name + ".bias", 1, out) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  initUniform(weight.value, rng, bound);
  initUniform(bias.value, rng, bound);
}

template <typename T>
Matrix<T> Linear<T>::forward(const Matrix<T>& x) {
  if (x.cols() != weight.value.rows()) {
    fail(ErrorCode::kShapeMismatch, weight.name + ": expected " + std::to_string(weight.value.rows()) +
                                        " input features, got " + std::to_string(x.cols()));
  }
  x_ = x;
  Matrix<T> y = x * weight.value;
  y.rowwise() += bias.value.row(0);
  return y;
}

template <typename T>
Matrix<T> Linear<T>::backward(const Matrix<T>& dy) {
  weight.grad.noalias() += x_.transpose() * dy;
  bias.grad.row(0) += dy.colwise().sum();
  return dy * weight.value.transpose();
}

template <typename T>
LayerNorm<T>::LayerNorm(const std::string& name, int dim, double eps)
    : gamma(name + ".gamma", 1, dim), beta(name + ".beta", 1, dim), eps_(eps) {
  gamma.value.setOnes();
}

template <typename T>
Matrix<T> LayerNorm<T>::forward(const Matrix<T>& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  xhat_.resize(n, d);
  inv_std_.assign(static_cast<std::size_t>(n), T(0));
  Matrix<T> y(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const T mean = x.row(i).mean();
    const T var = (x.row(i).array() - mean).square().mean();
    const T inv = T(1) / std::sqrt(var + static_cast<T>(eps_));
    inv_std_[static_cast<std::size_t>(i)] = inv;
    xhat_.row(i) = (x.row(i).array() - mean) * inv;
    y.row(i) = xhat_.row(i).cwiseProduct(gamma.value.row(0)) + beta.value.row(0);
  }
  return y;
}

template <typename T>
Matrix<T> LayerNorm<T>::backward(const Matrix<T>& dy) {
  const Eigen::Index n = dy.rows();
  const T d = static_cast<T>(dy.cols());
  gamma.grad.row(0) += dy.cwiseProduct(xhat_).colwise().sum();
  beta.grad.row(0) += dy.colwise().sum();
  Matrix<T> dx(n, dy.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const RowVector<T> g = dy.row(i).cwiseProduct(gamma.value.row(0));
    const T mean_g = g.sum() / d;
    const T mean_gx = g.cwiseProduct(xhat_.row(i)).sum() / d;
    dx.row(i) = (g.array() - mean_g - xhat_.row(i).array() * mean_gx) * inv_std_[static_cast<std::size_t>(i)];
  }
  return dx;
}

template <typename T>
Embedding<T>::Embedding(const std::string& name, int rows, int dim, Rng& rng) : table(name, rows, dim) {
  initNormal(table.value, rng, 1.0);
}

template <typename T>
Matrix<T> Embedding<T>::forward(const std::vector<int>& ids) {
  Matrix<T> out(static_cast<Eigen::Index>(ids.size()), table.value.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.value.rows()) {
      fail(ErrorCode::kIndexOutOfRange, table.name + ": id " + std::to_string(ids[i]) + " outside [0, " +
                                            std::to_string(table.value.rows()) + ")");
    }
    out.row(static_cast<Eigen::Index>(i)) = table.value.row(ids[i]);
  }
  ids_ = ids;
  return out;
}

template <typename T>
void Embedding<T>::backward(const Matrix<T>& dy) {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    table.grad.row(ids_[i]) += dy.row(static_cast<Eigen::Index>(i));
  }
}

template <typename T>
Matrix<T> softmaxRows(const Matrix<T>& logits) {
  Matrix<T> p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const T mx = logits.row(i).maxCoeff();
    if (!std::isfinite(static_cast<double>(mx))) {
      fail(ErrorCode::kAllMasked, "softmax row " + std::to_string(i) + " has no finite logit");
    }
    p.row(i) = (logits.row(i).array() - mx).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

template class Linear<float>;
template class Linear<double>;
template class LayerNorm<float>;
template class LayerNorm<double>;
template class Embedding<float>;
template class Embedding<double>;
template Matrix<float> softmaxRows(const Matrix<float>&);
template Matrix<double> softmaxRows(const Matrix<double>&);

}  // namespace ddi::nn
