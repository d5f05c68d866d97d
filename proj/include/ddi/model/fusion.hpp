// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ddi/chem/tokenizer.hpp"
#include "ddi/nn/layers.hpp"

namespace ddi::model {

using nn::Matrix;

struct FusionConfig {
  int num_layers = 6;
  int num_heads = 8;
  int hidden = 512;
  int per_drug_len = 16;
  int vocab_size = 2;
  int num_classes = 2;
  int visual_dim = 512;  // per-drug image embedding width

  int headDim() const { return hidden / num_heads; }
  int jointLen() const { return 2 * per_drug_len; }
  //! Throws kConfigError when the fields are inconsistent.
  void validate() const;
  bool operator==(const FusionConfig&) const = default;
};

//! A batch of joint pair sequences, row-major B x 2L.
struct PairBatch {
  int batch = 0;
  int length = 0;
  std::vector<int> token_ids;
  std::vector<int> segment_ids;
  std::vector<bool> key_mask;
};

//! Multi-head self-attention whose logits for head k receive an additive
//! per-key bias b_k, broadcast over query rows. Keys with mask false are
//! excluded from the softmax.
template <typename T>
class BiasedAttention {
 public:
  BiasedAttention() = default;
  BiasedAttention(const std::string& name, int hidden, int heads, Rng& rng);

  //! x: (B*n) x d. bias: B x (heads*n), or nullptr for no bias.
  Matrix<T> forward(const Matrix<T>& x, const Matrix<T>* bias, const std::vector<bool>& key_mask, int n);
  //! Returns dL/dx; adds dL/dbias into *dbias when non-null.
  Matrix<T> backward(const Matrix<T>& dy, Matrix<T>* dbias);

  //! Attention probabilities of the last forward, indexed [b * heads + h],
  //! each n x n (rows are queries).
  const std::vector<Matrix<T>>& probabilities() const { return probs_; }

  void collect(nn::ParameterList<T>& out);
  int heads() const { return heads_; }

  nn::Linear<T> q, k, v, o;

 private:
  int heads_ = 1, hidden_ = 0, n_ = 0, batch_ = 0;
  Matrix<T> qx_, kx_, vx_;
  std::vector<Matrix<T>> probs_;
};

//! max(0, x W1 + b1) W2 + b2 with W1, W2 square.
template <typename T>
class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(const std::string& name, int hidden, Rng& rng);
  Matrix<T> forward(const Matrix<T>& x);
  Matrix<T> backward(const Matrix<T>& dy);
  void collect(nn::ParameterList<T>& out) {
    fc1.collect(out);
    fc2.collect(out);
  }

  nn::Linear<T> fc1, fc2;

 private:
  nn::Relu<T> relu_;
};

//! Z = LN(X + Attn(X)); X' = LN(Z + FFN(Z)).
template <typename T>
class TransformerLayer {
 public:
  TransformerLayer(const std::string& name, int hidden, int heads, Rng& rng);
  Matrix<T> forward(const Matrix<T>& x, const Matrix<T>* bias, const std::vector<bool>& key_mask, int n);
  Matrix<T> backward(const Matrix<T>& dy, Matrix<T>* dbias);
  void collect(nn::ParameterList<T>& out);

  BiasedAttention<T> attention;
  FeedForward<T> ffn;
  nn::LayerNorm<T> norm1, norm2;
};

//! Embedding tables, the bias projector, T transformer layers and masked
//! mean pooling: maps a pair batch plus pair-visual vectors to B x d.
template <typename T>
class FusionEncoder {
 public:
  FusionEncoder(const FusionConfig& config, Rng& rng);

  //! visual: B x (2 * visual_dim), or nullptr for the bias-free variant.
  Matrix<T> forward(const PairBatch& batch, const Matrix<T>* visual);
  //! Returns dL/dvisual (zero-sized when forward had no visual input).
  Matrix<T> backward(const Matrix<T>& dpooled);

  //! Token + position + segment embedding for a batch, (B*n) x d.
  Matrix<T> embed(const PairBatch& batch);
  //! Per-key attention bias B x (K*2L) for pair-visual vectors.
  Matrix<T> projectBias(const Matrix<T>& visual);

  const FusionConfig& config() const { return config_; }
  const TransformerLayer<T>& layer(int i) const { return *layers_[static_cast<std::size_t>(i)]; }
  TransformerLayer<T>& layer(int i) { return *layers_[static_cast<std::size_t>(i)]; }
  int numLayers() const { return static_cast<int>(layers_.size()); }
  //! Hidden states (B*n) x d after the last layer of the last forward.
  const Matrix<T>& lastHidden() const { return hidden_; }
  //! Bias of the last forward (empty when bias-free).
  const Matrix<T>& lastBias() const { return bias_; }

  void collect(nn::ParameterList<T>& out);

  nn::Embedding<T> token_table, position_table, segment_table;
  nn::Linear<T> projector;

 private:
  FusionConfig config_;
  std::vector<std::unique_ptr<TransformerLayer<T>>> layers_;
  std::vector<bool> mask_;
  std::vector<int> counts_;
  Matrix<T> hidden_, bias_;
  int batch_ = 0;
  bool has_visual_ = false;
};

//! Batches joint sequences; throws kLengthMismatch on unequal lengths.
PairBatch makeBatch(const std::vector<const chem::PairSequence*>& pairs);

}  // namespace ddi::model
