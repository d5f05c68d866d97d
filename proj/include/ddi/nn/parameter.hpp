// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ddi/common/random.hpp"

namespace ddi::nn {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;

//! A named trainable array with its accumulated gradient.
template <typename T>
struct Parameter {
  std::string name;
  Matrix<T> value;
  Matrix<T> grad;
  bool trainable = true;

  Parameter() = default;
  Parameter(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), value(Matrix<T>::Zero(rows, cols)), grad(Matrix<T>::Zero(rows, cols)) {}

  void zeroGrad() { grad.setZero(); }
  Eigen::Index size() const { return value.size(); }
};

template <typename T>
using ParameterList = std::vector<Parameter<T>*>;

//! Fills with U(-bound, bound).
template <typename T>
void initUniform(Matrix<T>& m, Rng& rng, double bound) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(rng.uniform(-bound, bound));
}

//! Fills with N(0, std^2).
template <typename T>
void initNormal(Matrix<T>& m, Rng& rng, double std) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(std * rng.normal());
}

template <typename T>
void zeroGrads(const ParameterList<T>& params) {
  for (auto* p : params) p->zeroGrad();
}

//! Non-trainable state (e.g. running normalization statistics) that still
//! belongs in a checkpoint.
template <typename T>
struct Buffer {
  std::string name;
  Matrix<T> value;
};

template <typename T>
using BufferList = std::vector<Buffer<T>*>;

}  // namespace ddi::nn
