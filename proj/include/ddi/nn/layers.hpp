// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ddi/nn/parameter.hpp"

namespace ddi::nn {

//! y = x W + b for row-stacked inputs. W is in x out.
template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, int in, int out, Rng& rng);

  Matrix<T> forward(const Matrix<T>& x);
  //! Accumulates weight/bias gradients and returns dL/dx.
  Matrix<T> backward(const Matrix<T>& dy);

  int inFeatures() const { return static_cast<int>(weight.value.rows()); }
  int outFeatures() const { return static_cast<int>(weight.value.cols()); }
  void collect(ParameterList<T>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }

  Parameter<T> weight;
  Parameter<T> bias;

 private:
  Matrix<T> x_;
};

//! Row-wise layer normalization with learned scale and shift.
template <typename T>
class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(const std::string& name, int dim, double eps = 1e-5);

  Matrix<T> forward(const Matrix<T>& x);
  Matrix<T> backward(const Matrix<T>& dy);
  void collect(ParameterList<T>& out) {
    out.push_back(&gamma);
    out.push_back(&beta);
  }

  Parameter<T> gamma;
  Parameter<T> beta;

 private:
  double eps_ = 1e-5;
  Matrix<T> xhat_;
  std::vector<T> inv_std_;
};

template <typename T>
class Relu {
 public:
  Matrix<T> forward(const Matrix<T>& x) {
    mask_ = (x.array() > T(0)).template cast<T>();
    return x.cwiseMax(T(0));
  }
  Matrix<T> backward(const Matrix<T>& dy) const { return dy.cwiseProduct(mask_); }

 private:
  Matrix<T> mask_;
};

//! Lookup table; backward scatters row gradients into the table.
template <typename T>
class Embedding {
 public:
  Embedding() = default;
  Embedding(const std::string& name, int rows, int dim, Rng& rng);

  //! Throws kIndexOutOfRange for ids outside [0, rows).
  Matrix<T> forward(const std::vector<int>& ids);
  void backward(const Matrix<T>& dy);
  void collect(ParameterList<T>& out) { out.push_back(&table); }

  Parameter<T> table;

 private:
  std::vector<int> ids_;
};

//! Row softmax. Entries of -inf get probability 0; a row with no finite
//! entry throws kAllMasked.
template <typename T>
Matrix<T> softmaxRows(const Matrix<T>& logits);

}  // namespace ddi::nn
