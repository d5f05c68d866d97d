// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "ddi/common/tensor.hpp"
#include "ddi/nn/parameter.hpp"

namespace ddi::nn {

//! 2D convolution without bias on N x C x H x W tensors, computed as an
//! im2col product per sample.
template <typename T>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(const std::string& name, int in_channels, int out_channels, int kernel, int stride, int padding, Rng& rng);

  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& dy);
  void collect(ParameterList<T>& out) { out.push_back(&weight); }

  int outSize(int in) const { return (in + 2 * padding_ - kernel_) / stride_ + 1; }

  Parameter<T> weight;  // out_channels x (in_channels * kernel * kernel)

 private:
  void im2col(const T* image, int h, int w, Matrix<T>& cols) const;
  void col2im(const Matrix<T>& cols, int h, int w, T* image) const;

  int in_channels_ = 0, out_channels_ = 0, kernel_ = 1, stride_ = 1, padding_ = 0;
  Tensor<T> x_;
};

//! Per-channel batch normalization. Training mode normalizes with batch
//! statistics and updates running estimates (momentum 0.1, unbiased variance).
template <typename T>
class BatchNorm2d {
 public:
  BatchNorm2d() = default;
  BatchNorm2d(const std::string& name, int channels, double eps = 1e-5, double momentum = 0.1);

  Tensor<T> forward(const Tensor<T>& x, bool training);
  Tensor<T> backward(const Tensor<T>& dy);
  void collect(ParameterList<T>& out) {
    out.push_back(&gamma);
    out.push_back(&beta);
  }
  void collectBuffers(BufferList<T>& out) {
    out.push_back(&running_mean);
    out.push_back(&running_var);
  }

  Parameter<T> gamma;
  Parameter<T> beta;
  Buffer<T> running_mean;
  Buffer<T> running_var;

 private:
  double eps_ = 1e-5, momentum_ = 0.1;
  bool training_ = false;
  Tensor<T> xhat_;
  std::vector<T> inv_std_;
};

template <typename T>
class MaxPool2d {
 public:
  MaxPool2d(int kernel = 3, int stride = 2, int padding = 1) : kernel_(kernel), stride_(stride), padding_(padding) {}
  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& dy) const;

 private:
  int kernel_, stride_, padding_;
  Tensor<T>::Shape in_shape_;
  std::vector<std::size_t> argmax_;
};

template <typename T>
Tensor<T> reluForward(const Tensor<T>& x);
//! Gradient of relu given its output.
template <typename T>
Tensor<T> reluBackward(const Tensor<T>& y, const Tensor<T>& dy);

//! Two 3x3 convolutions with batch norm and an identity or projected shortcut.
template <typename T>
class BasicBlock {
 public:
  BasicBlock(const std::string& name, int in_channels, int out_channels, int stride, Rng& rng);

  Tensor<T> forward(const Tensor<T>& x, bool training);
  Tensor<T> backward(const Tensor<T>& dy);
  void collect(ParameterList<T>& out);
  void collectBuffers(BufferList<T>& out);

 private:
  Conv2d<T> conv1_, conv2_;
  BatchNorm2d<T> bn1_, bn2_;
  bool project_ = false;
  Conv2d<T> down_conv_;
  BatchNorm2d<T> down_bn_;
  Tensor<T> h1_, out_;
};

//! Residual network layout. The default is the 18-layer configuration with a
//! 512-wide embedding. Stage s has base_width << s channels; stages with zero
//! blocks are skipped.
struct BackboneConfig {
  int in_channels = 3;
  int base_width = 64;
  std::array<int, 4> blocks{2, 2, 2, 2};
  int stem_kernel = 7;
  int stem_stride = 2;
  bool stem_pool = true;

  int embeddingDim() const {
    int width = base_width;
    for (int s = 0; s < 4; ++s)
      if (blocks[static_cast<std::size_t>(s)] > 0) width = base_width << s;
    return width;
  }
  bool operator==(const BackboneConfig&) const = default;
};

//! Residual convolutional network with global average pooling. The last
//! stage's activations and their gradient are retained for saliency maps.
template <typename T>
class Backbone {
 public:
  Backbone(const BackboneConfig& config, const std::string& name, Rng& rng);

  //! N x C x H x W -> N x embeddingDim.
  Matrix<T> forward(const Tensor<T>& images, bool training);
  //! Propagates dL/d(embedding); returns dL/d(images).
  Tensor<T> backward(const Matrix<T>& dy);

  const BackboneConfig& config() const { return config_; }
  const Tensor<T>& lastFeatureMap() const { return features_; }
  const Tensor<T>& lastFeatureGrad() const { return feature_grad_; }

  void collect(ParameterList<T>& out);
  void collectBuffers(BufferList<T>& out);

 private:
  BackboneConfig config_;
  Conv2d<T> stem_conv_;
  BatchNorm2d<T> stem_bn_;
  MaxPool2d<T> pool_;
  std::vector<std::unique_ptr<BasicBlock<T>>> blocks_;
  Tensor<T> stem_out_, features_, feature_grad_;
};

}  // namespace ddi::nn
