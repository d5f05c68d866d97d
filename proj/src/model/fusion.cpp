// SPDX-License-Identifier: Apache-2.0
#include "ddi/model/fusion.hpp"

#include <cmath>
#include <limits>

#include "ddi/common/error.hpp"

namespace ddi::model {

void FusionConfig::validate() const {
  auto bad = [](const std::string& msg) { fail(ErrorCode::kConfigError, msg); };
  if (num_layers < 0) bad("num_layers must be >= 0");
  if (num_heads < 1 || hidden < 1) bad("num_heads and hidden must be positive");
  if (hidden % num_heads != 0) bad("hidden must be divisible by num_heads");
  if (per_drug_len < 1) bad("per_drug_len must be >= 1");
  if (vocab_size < 2) bad("vocab_size must be >= 2");
  if (num_classes < 1) bad("num_classes must be >= 1");
  if (visual_dim < 1) bad("visual_dim must be >= 1");
}

template <typename T>
BiasedAttention<T>::BiasedAttention(const std::string& name, int hidden, int heads, Rng& rng)
    : q(name + ".q", hidden, hidden, rng),
      k(name + ".k", hidden, hidden, rng),
      v(name + ".v", hidden, hidden, rng),
      o(name + ".o", hidden, hidden, rng),
      heads_(heads),
      hidden_(hidden) {}

template <typename T>
Matrix<T> BiasedAttention<T>::forward(const Matrix<T>& x, const Matrix<T>* bias, const std::vector<bool>& key_mask,
                                      int n) {
  if (n <= 0 || x.rows() % n != 0 || x.cols() != hidden_) {
    fail(ErrorCode::kShapeMismatch, "attention input " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                                        " is not (B*" + std::to_string(n) + ")x" + std::to_string(hidden_));
  }
  n_ = n;
  batch_ = static_cast<int>(x.rows() / n);
  if (key_mask.size() != static_cast<std::size_t>(batch_) * n) fail(ErrorCode::kShapeMismatch, "key mask length");
  if (bias && (bias->rows() != batch_ || bias->cols() != static_cast<Eigen::Index>(heads_) * n)) {
    fail(ErrorCode::kShapeMismatch, "attention bias must be B x (heads*n)");
  }
  qx_ = q.forward(x);
  kx_ = k.forward(x);
  vx_ = v.forward(x);
  const int dk = hidden_ / heads_;
  const T scale = T(1) / std::sqrt(static_cast<T>(dk));
  const T neg_inf = -std::numeric_limits<T>::infinity();
  probs_.assign(static_cast<std::size_t>(batch_) * heads_, Matrix<T>());
  Matrix<T> context(x.rows(), hidden_);
  for (int b = 0; b < batch_; ++b) {
    bool any = false;
    for (int j = 0; j < n; ++j) any = any || key_mask[static_cast<std::size_t>(b) * n + j];
    if (!any) fail(ErrorCode::kAllMasked, "pair " + std::to_string(b) + " has no unmasked key");
    for (int h = 0; h < heads_; ++h) {
      const auto qh = qx_.block(b * n, h * dk, n, dk);
      const auto kh = kx_.block(b * n, h * dk, n, dk);
      Matrix<T> logits = (qh * kh.transpose()) * scale;
      for (int j = 0; j < n; ++j) {
        if (!key_mask[static_cast<std::size_t>(b) * n + j]) {
          logits.col(j).setConstant(neg_inf);
        } else if (bias) {
          logits.col(j).array() += (*bias)(b, h * n + j);
        }
      }
      Matrix<T>& p = probs_[static_cast<std::size_t>(b) * heads_ + h];
      p = nn::softmaxRows(logits);
      context.block(b * n, h * dk, n, dk).noalias() = p * vx_.block(b * n, h * dk, n, dk);
    }
  }
  return o.forward(context);
}

template <typename T>
Matrix<T> BiasedAttention<T>::backward(const Matrix<T>& dy, Matrix<T>* dbias) {
  const Matrix<T> dcontext = o.backward(dy);
  const int n = n_;
  const int dk = hidden_ / heads_;
  const T scale = T(1) / std::sqrt(static_cast<T>(dk));
  Matrix<T> dq = Matrix<T>::Zero(qx_.rows(), hidden_);
  Matrix<T> dkm = Matrix<T>::Zero(kx_.rows(), hidden_);
  Matrix<T> dv = Matrix<T>::Zero(vx_.rows(), hidden_);
  for (int b = 0; b < batch_; ++b) {
    for (int h = 0; h < heads_; ++h) {
      const Matrix<T>& p = probs_[static_cast<std::size_t>(b) * heads_ + h];
      const auto dctx = dcontext.block(b * n, h * dk, n, dk);
      const auto vh = vx_.block(b * n, h * dk, n, dk);
      dv.block(b * n, h * dk, n, dk).noalias() += p.transpose() * dctx;
      const Matrix<T> dp = dctx * vh.transpose();
      Matrix<T> ds = p.cwiseProduct(dp);
      const Eigen::Matrix<T, Eigen::Dynamic, 1> row_dot = ds.rowwise().sum();
      ds -= p.cwiseProduct(row_dot.replicate(1, n));
      if (dbias) {
        dbias->block(b, h * n, 1, n) += ds.colwise().sum();
      }
      dq.block(b * n, h * dk, n, dk).noalias() += ds * kx_.block(b * n, h * dk, n, dk) * scale;
      dkm.block(b * n, h * dk, n, dk).noalias() += ds.transpose() * qx_.block(b * n, h * dk, n, dk) * scale;
    }
  }
  Matrix<T> dx = q.backward(dq);
  dx += k.backward(dkm);
  dx += v.backward(dv);
  return dx;
}

template <typename T>
void BiasedAttention<T>::collect(nn::ParameterList<T>& out) {
  q.collect(out);
  k.collect(out);
  v.collect(out);
  o.collect(out);
}

template <typename T>
FeedForward<T>::FeedForward(const std::string& name, int hidden, Rng& rng)
    : fc1(name + ".fc1", hidden, hidden, rng), fc2(name + ".fc2", hidden, hidden, rng) {}

template <typename T>
Matrix<T> FeedForward<T>::forward(const Matrix<T>& x) {
  return fc2.forward(relu_.forward(fc1.forward(x)));
}

template <typename T>
Matrix<T> FeedForward<T>::backward(const Matrix<T>& dy) {
  return fc1.backward(relu_.backward(fc2.backward(dy)));
}

template <typename T>
TransformerLayer<T>::TransformerLayer(const std::string& name, int hidden, int heads, Rng& rng)
    : attention(name + ".attn", hidden, heads, rng),
      ffn(name + ".ffn", hidden, rng),
      norm1(name + ".norm1", hidden),
      norm2(name + ".norm2", hidden) {}

template <typename T>
Matrix<T> TransformerLayer<T>::forward(const Matrix<T>& x, const Matrix<T>* bias, const std::vector<bool>& key_mask,
                                       int n) {
  const Matrix<T> z = norm1.forward(x + attention.forward(x, bias, key_mask, n));
  return norm2.forward(z + ffn.forward(z));
}

template <typename T>
Matrix<T> TransformerLayer<T>::backward(const Matrix<T>& dy, Matrix<T>* dbias) {
  const Matrix<T> dsum2 = norm2.backward(dy);
  const Matrix<T> dz = dsum2 + ffn.backward(dsum2);
  const Matrix<T> dsum1 = norm1.backward(dz);
  return dsum1 + attention.backward(dsum1, dbias);
}

template <typename T>
void TransformerLayer<T>::collect(nn::ParameterList<T>& out) {
  attention.collect(out);
  norm1.collect(out);
  ffn.collect(out);
  norm2.collect(out);
}

template <typename T>
FusionEncoder<T>::FusionEncoder(const FusionConfig& config, Rng& rng) : config_(config) {
  config.validate();
  token_table = nn::Embedding<T>("embed.token", config.vocab_size, config.hidden, rng);
  position_table = nn::Embedding<T>("embed.position", config.jointLen(), config.hidden, rng);
  segment_table = nn::Embedding<T>("embed.segment", 2, config.hidden, rng);
  projector = nn::Linear<T>("bias_projector", 2 * config.visual_dim, config.num_heads * config.jointLen(), rng);
  for (int i = 0; i < config.num_layers; ++i) {
    layers_.push_back(
        std::make_unique<TransformerLayer<T>>("layer" + std::to_string(i), config.hidden, config.num_heads, rng));
  }
}

template <typename T>
Matrix<T> FusionEncoder<T>::embed(const PairBatch& batch) {
  if (batch.length != config_.jointLen()) {
    fail(ErrorCode::kShapeMismatch, "pair length " + std::to_string(batch.length) + " != 2L = " +
                                        std::to_string(config_.jointLen()));
  }
  std::vector<int> positions(batch.token_ids.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<int>(i % batch.length);
  Matrix<T> x = token_table.forward(batch.token_ids);
  x += position_table.forward(positions);
  x += segment_table.forward(batch.segment_ids);
  return x;
}

template <typename T>
Matrix<T> FusionEncoder<T>::projectBias(const Matrix<T>& visual) {
  return projector.forward(visual);
}

template <typename T>
Matrix<T> FusionEncoder<T>::forward(const PairBatch& batch, const Matrix<T>* visual) {
  const int n = config_.jointLen();
  batch_ = batch.batch;
  mask_ = batch.key_mask;
  counts_.assign(static_cast<std::size_t>(batch_), 0);
  for (int b = 0; b < batch_; ++b) {
    for (int j = 0; j < n; ++j) counts_[static_cast<std::size_t>(b)] += mask_[static_cast<std::size_t>(b) * n + j];
    if (counts_[static_cast<std::size_t>(b)] == 0) {
      fail(ErrorCode::kAllMasked, "pair " + std::to_string(b) + " consists only of padding");
    }
  }
  has_visual_ = visual != nullptr;
  if (has_visual_) {
    if (visual->rows() != batch_ || visual->cols() != 2 * config_.visual_dim) {
      fail(ErrorCode::kShapeMismatch, "pair visual must be B x " + std::to_string(2 * config_.visual_dim));
    }
    bias_ = projectBias(*visual);
  } else {
    bias_.resize(0, 0);
  }
  Matrix<T> h = embed(batch);
  for (auto& layer : layers_) h = layer->forward(h, has_visual_ ? &bias_ : nullptr, mask_, n);
  hidden_ = h;
  Matrix<T> pooled = Matrix<T>::Zero(batch_, config_.hidden);
  for (int b = 0; b < batch_; ++b) {
    for (int j = 0; j < n; ++j) {
      if (mask_[static_cast<std::size_t>(b) * n + j]) pooled.row(b) += h.row(b * n + j);
    }
    pooled.row(b) /= static_cast<T>(counts_[static_cast<std::size_t>(b)]);
  }
  return pooled;
}

template <typename T>
Matrix<T> FusionEncoder<T>::backward(const Matrix<T>& dpooled) {
  const int n = config_.jointLen();
  Matrix<T> dh = Matrix<T>::Zero(static_cast<Eigen::Index>(batch_) * n, config_.hidden);
  for (int b = 0; b < batch_; ++b) {
    const T inv = T(1) / static_cast<T>(counts_[static_cast<std::size_t>(b)]);
    for (int j = 0; j < n; ++j) {
      if (mask_[static_cast<std::size_t>(b) * n + j]) dh.row(b * n + j) = dpooled.row(b) * inv;
    }
  }
  Matrix<T> dbias;
  if (has_visual_) dbias = Matrix<T>::Zero(bias_.rows(), bias_.cols());
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) dh = (*it)->backward(dh, has_visual_ ? &dbias : nullptr);
  token_table.backward(dh);
  position_table.backward(dh);
  segment_table.backward(dh);
  if (!has_visual_) return Matrix<T>();
  return projector.backward(dbias);
}

template <typename T>
void FusionEncoder<T>::collect(nn::ParameterList<T>& out) {
  token_table.collect(out);
  position_table.collect(out);
  segment_table.collect(out);
  projector.collect(out);
  for (auto& layer : layers_) layer->collect(out);
}

PairBatch makeBatch(const std::vector<const chem::PairSequence*>& pairs) {
  PairBatch batch;
  batch.batch = static_cast<int>(pairs.size());
  if (pairs.empty()) return batch;
  batch.length = static_cast<int>(pairs[0]->length());
  for (const auto* pair : pairs) {
    if (pair->length() != static_cast<std::size_t>(batch.length)) {
      fail(ErrorCode::kLengthMismatch, "pair sequences in a batch must share one length");
    }
    batch.token_ids.insert(batch.token_ids.end(), pair->token_ids.begin(), pair->token_ids.end());
    batch.segment_ids.insert(batch.segment_ids.end(), pair->segment_ids.begin(), pair->segment_ids.end());
    batch.key_mask.insert(batch.key_mask.end(), pair->key_mask.begin(), pair->key_mask.end());
  }
  return batch;
}

template class BiasedAttention<float>;
template class BiasedAttention<double>;
template class FeedForward<float>;
template class FeedForward<double>;
template class TransformerLayer<float>;
template class TransformerLayer<double>;
template class FusionEncoder<float>;
template class FusionEncoder<double>;

}  // namespace ddi::model
