// SPDX-License-Identifier: Apache-2.0
#include "ddi/model/ddi_model.hpp"

#include "ddi/common/error.hpp"

namespace ddi::model {

std::string modalityName(Modality m) {
  switch (m) {
    case Modality::kNone:
      return "none";
    case Modality::k2d:
      return "2d";
    case Modality::k3d:
      return "3d";
  }
  return "none";
}

Modality parseModality(const std::string& text) {
  if (text == "none") return Modality::kNone;
  if (text == "2d") return Modality::k2d;
  if (text == "3d") return Modality::k3d;
  fail(ErrorCode::kConfigError, "modality must be none, 2d or 3d, got '" + text + "'");
}

namespace {

FusionConfig withVisualDim(FusionConfig fusion, const nn::BackboneConfig& backbone) {
  fusion.visual_dim = backbone.embeddingDim();
  return fusion;
}

}  // namespace

template <typename T>
DdiModel<T>::DdiModel(const ModelConfig& config, std::uint64_t seed)
    : config_(config),
      encoder_rng_(mixSeed({seed, 1})),
      fusion_rng_(mixSeed({seed, 2})),
      head_rng_(mixSeed({seed, 3})),
      encoder_(config.modality == Modality::kNone
                   ? nullptr
                   : std::make_unique<ImageEncoder<T>>(config.backbone,
                                                       config.modality == Modality::k2d ? "encoder2d" : "encoder3d",
                                                       encoder_rng_)),
      fusion_(withVisualDim(config.fusion, config.backbone), fusion_rng_),
      head_(config.fusion.hidden, config.fusion.num_classes, head_rng_) {
  config_.fusion.visual_dim = config.backbone.embeddingDim();
}

template <typename T>
Matrix<T> DdiModel<T>::forwardVisual(const PairBatch& pairs, const Matrix<T>* visual) {
  used_encoder_ = false;
  if (visual) {
    visual_ = *visual;
  } else {
    visual_.resize(0, 0);
  }
  pooled_ = fusion_.forward(pairs, visual);
  return head_.forward(pooled_);
}

template <typename T>
Matrix<T> DdiModel<T>::forward(const ModelBatch<T>& batch, bool training) {
  if (config_.modality == Modality::kNone) return forwardVisual(batch.pairs, nullptr);
  if (batch.x_index.size() != static_cast<std::size_t>(batch.pairs.batch) ||
      batch.y_index.size() != batch.x_index.size()) {
    fail(ErrorCode::kShapeMismatch, "each pair needs an image index for both drugs");
  }
  const bool train_encoder = training && !config_.freeze_encoder;
  const Matrix<T> emb = config_.modality == Modality::k2d ? encoder_->encodeImages(batch.images, train_encoder)
                                                          : encoder_->encodeViews(batch.images, train_encoder);
  const auto b = static_cast<Eigen::Index>(batch.pairs.batch);
  Matrix<T> visual(b, 2 * emb.cols());
  for (Eigen::Index i = 0; i < b; ++i) {
    const int xi = batch.x_index[static_cast<std::size_t>(i)];
    const int yi = batch.y_index[static_cast<std::size_t>(i)];
    if (xi < 0 || yi < 0 || xi >= emb.rows() || yi >= emb.rows()) {
      fail(ErrorCode::kIndexOutOfRange, "pair image index outside the image batch");
    }
    visual.row(i) << emb.row(xi), emb.row(yi);
  }
  Matrix<T> logits = forwardVisual(batch.pairs, &visual);
  used_encoder_ = true;
  x_index_ = batch.x_index;
  y_index_ = batch.y_index;
  images_ = emb.rows();
  return logits;
}

template <typename T>
void DdiModel<T>::backward(const Matrix<T>& dlogits) {
  dvisual_ = fusion_.backward(head_.backward(dlogits));
  if (!used_encoder_ || config_.freeze_encoder) return;
  const Eigen::Index e = encoder_->embeddingDim();
  Matrix<T> demb = Matrix<T>::Zero(images_, e);
  for (std::size_t i = 0; i < x_index_.size(); ++i) {
    demb.row(x_index_[i]) += dvisual_.block(static_cast<Eigen::Index>(i), 0, 1, e);
    demb.row(y_index_[i]) += dvisual_.block(static_cast<Eigen::Index>(i), e, 1, e);
  }
  encoder_->backward(demb);
}

template <typename T>
nn::ParameterList<T> DdiModel<T>::allParameters() {
  nn::ParameterList<T> out;
  if (encoder_) encoder_->collect(out);
  fusion_.collect(out);
  head_.collect(out);
  return out;
}

template <typename T>
nn::ParameterList<T> DdiModel<T>::trainableParameters() {
  nn::ParameterList<T> out;
  if (encoder_ && !config_.freeze_encoder) encoder_->collect(out);
  fusion_.collect(out);
  head_.collect(out);
  return out;
}

template <typename T>
nn::BufferList<T> DdiModel<T>::buffers() {
  nn::BufferList<T> out;
  if (encoder_) encoder_->collectBuffers(out);
  return out;
}

template <typename T>
void DdiModel<T>::zeroGrad() {
  nn::zeroGrads(allParameters());
}

template class DdiModel<float>;
template class DdiModel<double>;

}  // namespace ddi::model
