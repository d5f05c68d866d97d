// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ddi/common/error.hpp"

namespace ddi {

//! Dense row-major n-dimensional array with value semantics.
template <typename T>
class Tensor {
 public:
  using Shape = std::vector<std::size_t>;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0)) : shape_(std::move(shape)), data_(count(shape_), fill) {}
  Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    require(data_.size() == count(shape_), ErrorCode::kShapeMismatch, "tensor data does not match shape");
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  std::vector<T>& storage() noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  template <typename... I>
  T& operator()(I... idx) noexcept {
    return data_[offset(idx...)];
  }
  template <typename... I>
  const T& operator()(I... idx) const noexcept {
    return data_[offset(idx...)];
  }

  void reshape(Shape shape) {
    require(count(shape) == data_.size(), ErrorCode::kShapeMismatch, "reshape changes element count");
    shape_ = std::move(shape);
  }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }
  void zero() { fill(T(0)); }

  template <typename U>
  Tensor<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return Tensor<U>(shape_, std::move(out));
  }

  bool sameShape(const Tensor& other) const noexcept { return shape_ == other.shape_; }

  static std::size_t count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  }

 private:
  template <typename... I>
  std::size_t offset(I... idx) const noexcept {
    const std::size_t ids[] = {static_cast<std::size_t>(idx)...};
    std::size_t off = 0;
    for (std::size_t k = 0; k < sizeof...(I); ++k) {
      off = off * shape_[k] + ids[k];
    }
    return off;
  }

  Shape shape_;
  std::vector<T> data_;
};

inline std::string shapeString(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    s += (i ? "x" : "") + std::to_string(shape[i]);
  }
  return s + "]";
}

}  // namespace ddi
