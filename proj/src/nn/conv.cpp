// SPDX-License-Identifier: Apache-2.0
#include "ddi/nn/conv.hpp"

#include <cmath>
#include <limits>

#include "ddi/common/error.hpp"

namespace ddi::nn {

namespace {

template <typename T>
void requireRank4(const Tensor<T>& x, const std::string& who) {
  if (x.rank() != 4) fail(ErrorCode::kShapeMismatch, who + ": expected N x C x H x W, got " + shapeString(x.shape()));
}

template <typename T>
using MapMatrix = Eigen::Map<Matrix<T>>;
template <typename T>
using ConstMapMatrix = Eigen::Map<const Matrix<T>>;

}  // namespace

template <typename T>
Conv2d<T>::Conv2d(const std::string& name, int in_channels, int out_channels, int kernel, int stride, int padding,
                  Rng& rng)
    : weight(name + ".weight", out_channels, in_channels * kernel * kernel),
      in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_(kernel),
      stride_(stride),
      padding_(padding) {
  // He initialization over fan-out, as used for residual networks.
  initNormal(weight.value, rng, std::sqrt(2.0 / (out_channels * kernel * kernel)));
}

template <typename T>
void Conv2d<T>::im2col(const T* image, int h, int w, Matrix<T>& cols) const {
  const int ho = outSize(h), wo = outSize(w);
  cols.resize(static_cast<Eigen::Index>(in_channels_) * kernel_ * kernel_, static_cast<Eigen::Index>(ho) * wo);
  T* out = cols.data();
  for (int c = 0; c < in_channels_; ++c) {
    const T* plane = image + static_cast<std::size_t>(c) * h * w;
    for (int ki = 0; ki < kernel_; ++ki) {
      for (int kj = 0; kj < kernel_; ++kj) {
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride_ - padding_ + ki;
          if (iy < 0 || iy >= h) {
            std::fill(out, out + wo, T(0));
            out += wo;
            continue;
          }
          const T* row = plane + static_cast<std::size_t>(iy) * w;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride_ - padding_ + kj;
            *out++ = (ix >= 0 && ix < w) ? row[ix] : T(0);
          }
        }
      }
    }
  }
}

template <typename T>
void Conv2d<T>::col2im(const Matrix<T>& cols, int h, int w, T* image) const {
  const int ho = outSize(h), wo = outSize(w);
  const T* in = cols.data();
  for (int c = 0; c < in_channels_; ++c) {
    T* plane = image + static_cast<std::size_t>(c) * h * w;
    for (int ki = 0; ki < kernel_; ++ki) {
      for (int kj = 0; kj < kernel_; ++kj) {
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride_ - padding_ + ki;
          if (iy < 0 || iy >= h) {
            in += wo;
            continue;
          }
          T* row = plane + static_cast<std::size_t>(iy) * w;
          for (int ox = 0; ox < wo; ++ox, ++in) {
            const int ix = ox * stride_ - padding_ + kj;
            if (ix >= 0 && ix < w) row[ix] += *in;
          }
        }
      }
    }
  }
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x) {
  requireRank4(x, weight.name);
  if (static_cast<int>(x.dim(1)) != in_channels_) {
    fail(ErrorCode::kShapeMismatch, weight.name + ": expected " + std::to_string(in_channels_) + " channels, got " +
                                        shapeString(x.shape()));
  }
  const int n = static_cast<int>(x.dim(0)), h = static_cast<int>(x.dim(2)), w = static_cast<int>(x.dim(3));
  const int ho = outSize(h), wo = outSize(w);
  if (ho <= 0 || wo <= 0) fail(ErrorCode::kShapeMismatch, weight.name + ": input too small " + shapeString(x.shape()));
  x_ = x;
  Tensor<T> y({x.dim(0), static_cast<std::size_t>(out_channels_), static_cast<std::size_t>(ho),
               static_cast<std::size_t>(wo)});
  Matrix<T> cols;
  const std::size_t in_stride = static_cast<std::size_t>(in_channels_) * h * w;
  const std::size_t out_stride = static_cast<std::size_t>(out_channels_) * ho * wo;
  for (int i = 0; i < n; ++i) {
    im2col(x.data() + i * in_stride, h, w, cols);
    MapMatrix<T>(y.data() + i * out_stride, out_channels_, static_cast<Eigen::Index>(ho) * wo).noalias() =
        weight.value * cols;
  }
  return y;
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& dy) {
  const int n = static_cast<int>(x_.dim(0)), h = static_cast<int>(x_.dim(2)), w = static_cast<int>(x_.dim(3));
  const int ho = outSize(h), wo = outSize(w);
  Tensor<T> dx(x_.shape());
  Matrix<T> cols, dcols;
  const std::size_t in_stride = static_cast<std::size_t>(in_channels_) * h * w;
  const std::size_t out_stride = static_cast<std::size_t>(out_channels_) * ho * wo;
  for (int i = 0; i < n; ++i) {
    ConstMapMatrix<T> g(dy.data() + i * out_stride, out_channels_, static_cast<Eigen::Index>(ho) * wo);
    im2col(x_.data() + i * in_stride, h, w, cols);
    weight.grad.noalias() += g * cols.transpose();
    dcols.noalias() = weight.value.transpose() * g;
    col2im(dcols, h, w, dx.data() + i * in_stride);
  }
  return dx;
}

template <typename T>
BatchNorm2d<T>::BatchNorm2d(const std::string& name, int channels, double eps, double momentum)
    : gamma(name + ".gamma", 1, channels),
      beta(name + ".beta", 1, channels),
      running_mean{name + ".running_mean", Matrix<T>::Zero(1, channels)},
      running_var{name + ".running_var", Matrix<T>::Ones(1, channels)},
      eps_(eps),
      momentum_(momentum) {
  gamma.value.setOnes();
}

template <typename T>
Tensor<T> BatchNorm2d<T>::forward(const Tensor<T>& x, bool training) {
  requireRank4(x, gamma.name);
  const std::size_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  if (static_cast<Eigen::Index>(c) != gamma.value.cols()) fail(ErrorCode::kShapeMismatch, gamma.name + ": channel count");
  training_ = training;
  xhat_ = Tensor<T>(x.shape());
  inv_std_.assign(c, T(0));
  Tensor<T> y(x.shape());
  const double m = static_cast<double>(n * hw);
  for (std::size_t ch = 0; ch < c; ++ch) {
    T mean, var;
    if (training) {
      double s = 0, s2 = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const T* p = x.data() + (i * c + ch) * hw;
        for (std::size_t k = 0; k < hw; ++k) s += p[k];
      }
      const double mu = s / m;
      for (std::size_t i = 0; i < n; ++i) {
        const T* p = x.data() + (i * c + ch) * hw;
        for (std::size_t k = 0; k < hw; ++k) s2 += (p[k] - mu) * (p[k] - mu);
      }
      mean = static_cast<T>(mu);
      var = static_cast<T>(s2 / m);
      const double unbiased = m > 1 ? s2 / (m - 1) : s2;
      const auto idx = static_cast<Eigen::Index>(ch);
      running_mean.value(0, idx) =
          static_cast<T>((1 - momentum_) * running_mean.value(0, idx) + momentum_ * mu);
      running_var.value(0, idx) =
          static_cast<T>((1 - momentum_) * running_var.value(0, idx) + momentum_ * unbiased);
    } else {
      mean = running_mean.value(0, static_cast<Eigen::Index>(ch));
      var = running_var.value(0, static_cast<Eigen::Index>(ch));
    }
    const T inv = T(1) / std::sqrt(var + static_cast<T>(eps_));
    inv_std_[ch] = inv;
    const T g = gamma.value(0, static_cast<Eigen::Index>(ch));
    const T b = beta.value(0, static_cast<Eigen::Index>(ch));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * c + ch) * hw;
      for (std::size_t k = 0; k < hw; ++k) {
        const T xh = (x[off + k] - mean) * inv;
        xhat_[off + k] = xh;
        y[off + k] = g * xh + b;
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm2d<T>::backward(const Tensor<T>& dy) {
  const std::size_t n = dy.dim(0), c = dy.dim(1), hw = dy.dim(2) * dy.dim(3);
  const T m = static_cast<T>(n * hw);
  Tensor<T> dx(dy.shape());
  for (std::size_t ch = 0; ch < c; ++ch) {
    T sum_dy = 0, sum_dy_xh = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * c + ch) * hw;
      for (std::size_t k = 0; k < hw; ++k) {
        sum_dy += dy[off + k];
        sum_dy_xh += dy[off + k] * xhat_[off + k];
      }
    }
    const auto idx = static_cast<Eigen::Index>(ch);
    gamma.grad(0, idx) += sum_dy_xh;
    beta.grad(0, idx) += sum_dy;
    const T scale = gamma.value(0, idx) * inv_std_[ch];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * c + ch) * hw;
      for (std::size_t k = 0; k < hw; ++k) {
        dx[off + k] = training_ ? scale * (dy[off + k] - sum_dy / m - xhat_[off + k] * sum_dy_xh / m)
                                : scale * dy[off + k];
      }
    }
  }
  return dx;
}

template <typename T>
Tensor<T> MaxPool2d<T>::forward(const Tensor<T>& x) {
  requireRank4(x, "maxpool");
  const std::size_t n = x.dim(0), c = x.dim(1);
  const int h = static_cast<int>(x.dim(2)), w = static_cast<int>(x.dim(3));
  const int ho = (h + 2 * padding_ - kernel_) / stride_ + 1;
  const int wo = (w + 2 * padding_ - kernel_) / stride_ + 1;
  in_shape_ = x.shape();
  Tensor<T> y({n, c, static_cast<std::size_t>(ho), static_cast<std::size_t>(wo)});
  argmax_.assign(y.size(), 0);
  std::size_t o = 0;
  for (std::size_t p = 0; p < n * c; ++p) {
    const std::size_t base = p * h * w;
    for (int oy = 0; oy < ho; ++oy) {
      for (int ox = 0; ox < wo; ++ox, ++o) {
        T best = -std::numeric_limits<T>::infinity();
        std::size_t where = base;
        for (int ki = 0; ki < kernel_; ++ki) {
          const int iy = oy * stride_ - padding_ + ki;
          if (iy < 0 || iy >= h) continue;
          for (int kj = 0; kj < kernel_; ++kj) {
            const int ix = ox * stride_ - padding_ + kj;
            if (ix < 0 || ix >= w) continue;
            const std::size_t at = base + static_cast<std::size_t>(iy) * w + ix;
            if (x[at] > best) {
              best = x[at];
              where = at;
            }
          }
        }
        y[o] = best;
        argmax_[o] = where;
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> MaxPool2d<T>::backward(const Tensor<T>& dy) const {
  Tensor<T> dx(in_shape_);
  for (std::size_t o = 0; o < dy.size(); ++o) dx[argmax_[o]] += dy[o];
  return dx;
}

template <typename T>
Tensor<T> reluForward(const Tensor<T>& x) {
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
  return y;
}

template <typename T>
Tensor<T> reluBackward(const Tensor<T>& y, const Tensor<T>& dy) {
  Tensor<T> dx(dy.shape());
  for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = y[i] > T(0) ? dy[i] : T(0);
  return dx;
}

template <typename T>
BasicBlock<T>::BasicBlock(const std::string& name, int in_channels, int out_channels, int stride, Rng& rng)
    : conv1_(name + ".conv1", in_channels, out_channels, 3, stride, 1, rng),
      conv2_(name + ".conv2", out_channels, out_channels, 3, 1, 1, rng),
      bn1_(name + ".bn1", out_channels),
      bn2_(name + ".bn2", out_channels),
      project_(stride != 1 || in_channels != out_channels) {
  if (project_) {
    down_conv_ = Conv2d<T>(name + ".down.conv", in_channels, out_channels, 1, stride, 0, rng);
    down_bn_ = BatchNorm2d<T>(name + ".down.bn", out_channels);
  }
}

template <typename T>
Tensor<T> BasicBlock<T>::forward(const Tensor<T>& x, bool training) {
  h1_ = reluForward(bn1_.forward(conv1_.forward(x), training));
  Tensor<T> h2 = bn2_.forward(conv2_.forward(h1_), training);
  const Tensor<T> shortcut = project_ ? down_bn_.forward(down_conv_.forward(x), training) : x;
  for (std::size_t i = 0; i < h2.size(); ++i) h2[i] += shortcut[i];
  out_ = reluForward(h2);
  return out_;
}

template <typename T>
Tensor<T> BasicBlock<T>::backward(const Tensor<T>& dy) {
  const Tensor<T> dsum = reluBackward(out_, dy);
  Tensor<T> dx = conv1_.backward(bn1_.backward(reluBackward(h1_, conv2_.backward(bn2_.backward(dsum)))));
  const Tensor<T> dshort = project_ ? down_conv_.backward(down_bn_.backward(dsum)) : dsum;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dshort[i];
  return dx;
}

template <typename T>
void BasicBlock<T>::collect(ParameterList<T>& out) {
  conv1_.collect(out);
  bn1_.collect(out);
  conv2_.collect(out);
  bn2_.collect(out);
  if (project_) {
    down_conv_.collect(out);
    down_bn_.collect(out);
  }
}

template <typename T>
void BasicBlock<T>::collectBuffers(BufferList<T>& out) {
  bn1_.collectBuffers(out);
  bn2_.collectBuffers(out);
  if (project_) down_bn_.collectBuffers(out);
}

template <typename T>
Backbone<T>::Backbone(const BackboneConfig& config, const std::string& name, Rng& rng)
    : config_(config),
      stem_conv_(name + ".stem.conv", config.in_channels, config.base_width, config.stem_kernel, config.stem_stride,
                 config.stem_kernel / 2, rng),
      stem_bn_(name + ".stem.bn", config.base_width) {
  int in = config.base_width;
  for (int stage = 0; stage < 4; ++stage) {
    const int out = config.base_width << stage;
    for (int b = 0; b < config.blocks[static_cast<std::size_t>(stage)]; ++b) {
      const int stride = (stage > 0 && b == 0) ? 2 : 1;
      blocks_.push_back(std::make_unique<BasicBlock<T>>(
          name + ".layer" + std::to_string(stage + 1) + "." + std::to_string(b), in, out, stride, rng));
      in = out;
    }
  }
}

template <typename T>
Matrix<T> Backbone<T>::forward(const Tensor<T>& images, bool training) {
  requireRank4(images, "backbone");
  Tensor<T> h = reluForward(stem_bn_.forward(stem_conv_.forward(images), training));
  stem_out_ = h;
  if (config_.stem_pool) h = pool_.forward(h);
  for (auto& block : blocks_) h = block->forward(h, training);
  features_ = h;
  const std::size_t n = h.dim(0), c = h.dim(1), hw = h.dim(2) * h.dim(3);
  Matrix<T> out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const T* p = h.data() + (i * c + ch) * hw;
      T s = 0;
      for (std::size_t k = 0; k < hw; ++k) s += p[k];
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ch)) = s / static_cast<T>(hw);
    }
  }
  return out;
}

template <typename T>
Tensor<T> Backbone<T>::backward(const Matrix<T>& dy) {
  const std::size_t n = features_.dim(0), c = features_.dim(1), hw = features_.dim(2) * features_.dim(3);
  Tensor<T> g(features_.shape());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const T v = dy(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ch)) / static_cast<T>(hw);
      std::fill(g.data() + (i * c + ch) * hw, g.data() + (i * c + ch + 1) * hw, v);
    }
  }
  feature_grad_ = g;
  for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) g = (*it)->backward(g);
  if (config_.stem_pool) g = pool_.backward(g);
  return stem_conv_.backward(stem_bn_.backward(reluBackward(stem_out_, g)));
}

template <typename T>
void Backbone<T>::collect(ParameterList<T>& out) {
  stem_conv_.collect(out);
  stem_bn_.collect(out);
  for (auto& block : blocks_) block->collect(out);
}

template <typename T>
void Backbone<T>::collectBuffers(BufferList<T>& out) {
  stem_bn_.collectBuffers(out);
  for (auto& block : blocks_) block->collectBuffers(out);
}

template class Conv2d<float>;
template class Conv2d<double>;
template class BatchNorm2d<float>;
template class BatchNorm2d<double>;
template class MaxPool2d<float>;
template class MaxPool2d<double>;
template class BasicBlock<float>;
template class BasicBlock<double>;
template class Backbone<float>;
template class Backbone<double>;
template Tensor<float> reluForward(const Tensor<float>&);
template Tensor<double> reluForward(const Tensor<double>&);
template Tensor<float> reluBackward(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> reluBackward(const Tensor<double>&, const Tensor<double>&);

}  // namespace ddi::nn
