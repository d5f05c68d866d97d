// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ddi/common/tensor.hpp"
#include "ddi/nn/conv.hpp"

namespace ddi::model {

using nn::Matrix;

//! Per-channel input normalization followed by the residual backbone.
//! Single images are N x C x H x W; view stacks are N x V x C x H x W and
//! their frame embeddings are averaged.
template <typename T>
class ImageEncoder {
 public:
  ImageEncoder(const nn::BackboneConfig& config, const std::string& name, Rng& rng);

  Matrix<T> encodeImages(const Tensor<T>& images, bool training);
  Matrix<T> encodeViews(const Tensor<T>& views, bool training);
  //! Backpropagates through the most recent encode call.
  void backward(const Matrix<T>& dembedding);

  //! Sets mean/std from a set of training images (N x C x H x W or N x V x C x H x W).
  void fitNormalization(const Tensor<T>& images);

  int embeddingDim() const { return backbone_.config().embeddingDim(); }
  nn::Backbone<T>& backbone() { return backbone_; }
  const nn::Backbone<T>& backbone() const { return backbone_; }
  //! Frames per sample in the last encode call (1 for single images).
  int lastViews() const { return views_; }

  void collect(nn::ParameterList<T>& out) { backbone_.collect(out); }
  void collectBuffers(nn::BufferList<T>& out);

  nn::Buffer<T> mean;
  nn::Buffer<T> stddev;

 private:
  Tensor<T> normalize(const Tensor<T>& images) const;

  nn::Backbone<T> backbone_;
  int views_ = 1;
};

//! [ix | iy] for row vectors of equal width; throws kShapeMismatch otherwise.
template <typename T>
Matrix<T> pairVisual(const Matrix<T>& ix, const Matrix<T>& iy);

}  // namespace ddi::model
