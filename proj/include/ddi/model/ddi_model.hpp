// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ddi/model/fusion.hpp"
#include "ddi/model/head.hpp"
#include "ddi/model/image_encoder.hpp"

namespace ddi::model {

enum class Modality { kNone, k2d, k3d };

std::string modalityName(Modality m);
//! Parses "none", "2d" or "3d"; throws kConfigError otherwise.
Modality parseModality(const std::string& text);

struct ModelConfig {
  FusionConfig fusion;
  Modality modality = Modality::k2d;
  nn::BackboneConfig backbone;
  bool freeze_encoder = false;
};

//! One mini-batch: joint sequences, one image entry per distinct drug and,
//! for each pair, the rows of its two drugs in that image tensor.
template <typename T>
struct ModelBatch {
  PairBatch pairs;
  Tensor<T> images;  // N x C x H x W (2d) or N x V x C x H x W (3d); empty for modality none
  std::vector<int> x_index;
  std::vector<int> y_index;
};

//! Image encoder, biased-attention fusion encoder and prediction head.
template <typename T>
class DdiModel {
 public:
  DdiModel(const ModelConfig& config, std::uint64_t seed);

  //! Returns B x |R| logits.
  Matrix<T> forward(const ModelBatch<T>& batch, bool training);
  //! Same, with pair-visual vectors supplied directly (nullptr: no bias).
  Matrix<T> forwardVisual(const PairBatch& pairs, const Matrix<T>* visual);
  void backward(const Matrix<T>& dlogits);

  const ModelConfig& config() const { return config_; }
  bool hasEncoder() const { return encoder_ != nullptr; }
  ImageEncoder<T>& encoder() { return *encoder_; }
  FusionEncoder<T>& fusion() { return fusion_; }
  PredictionHead<T>& head() { return head_; }
  //! Pooled pair representations of the last forward, B x d.
  const Matrix<T>& pooled() const { return pooled_; }
  //! Pair-visual input of the last forward (empty without images).
  const Matrix<T>& lastVisual() const { return visual_; }
  //! Gradient with respect to the pair-visual input from the last backward.
  const Matrix<T>& lastVisualGrad() const { return dvisual_; }

  //! Parameters updated by the optimizer (excludes a frozen encoder).
  nn::ParameterList<T> trainableParameters();
  //! Every parameter, including frozen ones, for checkpoints.
  nn::ParameterList<T> allParameters();
  nn::BufferList<T> buffers();
  void zeroGrad();

 private:
  ModelConfig config_;
  // Each component draws from its own stream so that, for example, the
  // fusion weights do not depend on whether an image encoder exists.
  Rng encoder_rng_, fusion_rng_, head_rng_;
  std::unique_ptr<ImageEncoder<T>> encoder_;
  FusionEncoder<T> fusion_;
  PredictionHead<T> head_;
  Matrix<T> pooled_, visual_, dvisual_;
  std::vector<int> x_index_, y_index_;
  Eigen::Index images_ = 0;
  bool used_encoder_ = false;
};

}  // namespace ddi::model
