// SPDX-License-Identifier: Apache-2.0
#include "ddi/model/image_encoder.hpp"

#include <cmath>

#include "ddi/common/error.hpp"

namespace ddi::model {

template <typename T>
ImageEncoder<T>::ImageEncoder(const nn::BackboneConfig& config, const std::string& name, Rng& rng)
    : mean{name + ".input_mean", Matrix<T>::Zero(1, config.in_channels)},
      stddev{name + ".input_std", Matrix<T>::Ones(1, config.in_channels)},
      backbone_(config, name, rng) {}

template <typename T>
Tensor<T> ImageEncoder<T>::normalize(const Tensor<T>& images) const {
  const std::size_t c = images.dim(1), hw = images.dim(2) * images.dim(3);
  Tensor<T> out(images.shape());
  for (std::size_t i = 0; i < images.dim(0); ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const T m = mean.value(0, static_cast<Eigen::Index>(ch));
      const T inv = T(1) / stddev.value(0, static_cast<Eigen::Index>(ch));
      const std::size_t off = (i * c + ch) * hw;
      for (std::size_t k = 0; k < hw; ++k) out[off + k] = (images[off + k] - m) * inv;
    }
  }
  return out;
}

template <typename T>
Matrix<T> ImageEncoder<T>::encodeImages(const Tensor<T>& images, bool training) {
  if (images.rank() != 4 || static_cast<int>(images.dim(1)) != backbone_.config().in_channels) {
    fail(ErrorCode::kShapeMismatch, "image batch must be N x " + std::to_string(backbone_.config().in_channels) +
                                        " x H x W, got " + shapeString(images.shape()));
  }
  views_ = 1;
  return backbone_.forward(normalize(images), training);
}

template <typename T>
Matrix<T> ImageEncoder<T>::encodeViews(const Tensor<T>& views, bool training) {
  if (views.rank() != 5 || static_cast<int>(views.dim(2)) != backbone_.config().in_channels) {
    fail(ErrorCode::kShapeMismatch, "view stack must be N x V x C x H x W, got " + shapeString(views.shape()));
  }
  const std::size_t n = views.dim(0), v = views.dim(1);
  Tensor<T> flat = views;
  flat.reshape({n * v, views.dim(2), views.dim(3), views.dim(4)});
  const Matrix<T> frames = backbone_.forward(normalize(flat), training);
  views_ = static_cast<int>(v);
  Matrix<T> out = Matrix<T>::Zero(static_cast<Eigen::Index>(n), frames.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < v; ++f) out.row(static_cast<Eigen::Index>(i)) += frames.row(static_cast<Eigen::Index>(i * v + f));
    out.row(static_cast<Eigen::Index>(i)) /= static_cast<T>(v);
  }
  return out;
}

template <typename T>
void ImageEncoder<T>::backward(const Matrix<T>& dembedding) {
  if (views_ == 1) {
    backbone_.backward(dembedding);
    return;
  }
  const Eigen::Index n = dembedding.rows();
  Matrix<T> dframes(n * views_, dembedding.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int f = 0; f < views_; ++f) dframes.row(i * views_ + f) = dembedding.row(i) / static_cast<T>(views_);
  }
  backbone_.backward(dframes);
}

template <typename T>
void ImageEncoder<T>::fitNormalization(const Tensor<T>& images) {
  const std::size_t c = images.rank() == 5 ? images.dim(2) : images.dim(1);
  const std::size_t hw = images.dim(images.rank() - 2) * images.dim(images.rank() - 1);
  const std::size_t planes = images.size() / hw;
  std::vector<double> s(c, 0.0), s2(c, 0.0);
  for (std::size_t p = 0; p < planes; ++p) {
    const std::size_t ch = p % c;
    for (std::size_t k = 0; k < hw; ++k) {
      const double x = images[p * hw + k];
      s[ch] += x;
      s2[ch] += x * x;
    }
  }
  const double count = static_cast<double>(planes / c * hw);
  for (std::size_t ch = 0; ch < c; ++ch) {
    const double m = s[ch] / count;
    const double var = std::max(0.0, s2[ch] / count - m * m);
    mean.value(0, static_cast<Eigen::Index>(ch)) = static_cast<T>(m);
    // Blank images have zero variance; keep unit scale.
    stddev.value(0, static_cast<Eigen::Index>(ch)) = static_cast<T>(var > 1e-12 ? std::sqrt(var) : 1.0);
  }
}

template <typename T>
void ImageEncoder<T>::collectBuffers(nn::BufferList<T>& out) {
  out.push_back(&mean);
  out.push_back(&stddev);
  backbone_.collectBuffers(out);
}

template <typename T>
Matrix<T> pairVisual(const Matrix<T>& ix, const Matrix<T>& iy) {
  if (ix.rows() != iy.rows() || ix.cols() != iy.cols()) {
    fail(ErrorCode::kShapeMismatch, "pair visual halves differ in shape");
  }
  Matrix<T> out(ix.rows(), ix.cols() + iy.cols());
  out << ix, iy;
  return out;
}

template class ImageEncoder<float>;
template class ImageEncoder<double>;
template Matrix<float> pairVisual(const Matrix<float>&, const Matrix<float>&);
template Matrix<double> pairVisual(const Matrix<double>&, const Matrix<double>&);

}  // namespace ddi::model
