// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "ddi/common/error.hpp"
#include "ddi/model/image_encoder.hpp"
#include "grad_check.hpp"

namespace ddi::model {
namespace {

using Mat = Matrix<double>;
using Img = std::vector<std::vector<std::vector<double>>>;  // C x H x W

// Straightforward reference implementation of the residual network in
// inference mode, written with direct loops.
struct RefBn {
  std::vector<double> g, b, m, v;
  Img apply(const Img& x) const {
    Img y = x;
    for (std::size_t c = 0; c < x.size(); ++c)
      for (auto& row : y[c])
        for (double& t : row) t = g[c] * (t - m[c]) / std::sqrt(v[c] + 1e-5) + b[c];
    return y;
  }
};

Img conv(const Img& x, const Mat& w, int k, int stride, int pad) {
  const int cin = static_cast<int>(x.size()), h = static_cast<int>(x[0].size()), wd = static_cast<int>(x[0][0].size());
  const int cout = static_cast<int>(w.rows());
  const int ho = (h + 2 * pad - k) / stride + 1, wo = (wd + 2 * pad - k) / stride + 1;
  Img y(static_cast<std::size_t>(cout), std::vector<std::vector<double>>(ho, std::vector<double>(wo, 0.0)));
  for (int o = 0; o < cout; ++o)
    for (int oy = 0; oy < ho; ++oy)
      for (int ox = 0; ox < wo; ++ox) {
        double s = 0;
        for (int c = 0; c < cin; ++c)
          for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
              const int iy = oy * stride - pad + i, ix = ox * stride - pad + j;
              if (iy >= 0 && iy < h && ix >= 0 && ix < wd) s += w(o, (c * k + i) * k + j) * x[c][iy][ix];
            }
        y[o][oy][ox] = s;
      }
  return y;
}

Img relu(Img x) {
  for (auto& c : x)
    for (auto& r : c)
      for (double& t : r) t = std::max(0.0, t);
  return x;
}

Img maxpool(const Img& x) {
  const int h = static_cast<int>(x[0].size()), w = static_cast<int>(x[0][0].size());
  const int ho = (h + 2 - 3) / 2 + 1, wo = (w + 2 - 3) / 2 + 1;
  Img y(x.size(), std::vector<std::vector<double>>(ho, std::vector<double>(wo, -1e300)));
  for (std::size_t c = 0; c < x.size(); ++c)
    for (int oy = 0; oy < ho; ++oy)
      for (int ox = 0; ox < wo; ++ox)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            const int iy = oy * 2 - 1 + i, ix = ox * 2 - 1 + j;
            if (iy >= 0 && iy < h && ix >= 0 && ix < w) y[c][oy][ox] = std::max(y[c][oy][ox], x[c][iy][ix]);
          }
  return y;
}

Img add(Img a, const Img& b) {
  for (std::size_t c = 0; c < a.size(); ++c)
    for (std::size_t i = 0; i < a[c].size(); ++i)
      for (std::size_t j = 0; j < a[c][i].size(); ++j) a[c][i][j] += b[c][i][j];
  return a;
}

// Pulls weights out of the backbone by parameter name.
struct Weights {
  std::map<std::string, Mat> p;
  explicit Weights(nn::Backbone<double>& net) {
    nn::ParameterList<double> params;
    net.collect(params);
    for (auto* q : params) p[q->name] = q->value;
    nn::BufferList<double> bufs;
    net.collectBuffers(bufs);
    for (auto* b : bufs) p[b->name] = b->value;
  }
  RefBn bn(const std::string& n) const {
    auto row = [&](const std::string& k) {
      const Mat& m = p.at(n + k);
      return std::vector<double>(m.data(), m.data() + m.size());
    };
    return {row(".gamma"), row(".beta"), row(".running_mean"), row(".running_var")};
  }
};

std::vector<double> referenceForward(nn::Backbone<double>& net, const Img& image) {
  const auto& cfg = net.config();
  const Weights w(net);
  Img h = relu(w.bn("bb.stem.bn").apply(conv(image, w.p.at("bb.stem.conv.weight"), cfg.stem_kernel, cfg.stem_stride,
                                              cfg.stem_kernel / 2)));
  if (cfg.stem_pool) h = maxpool(h);
  int in = cfg.base_width;
  for (int s = 0; s < 4; ++s) {
    for (int b = 0; b < cfg.blocks[static_cast<std::size_t>(s)]; ++b) {
      const std::string n = "bb.layer" + std::to_string(s + 1) + "." + std::to_string(b);
      const int out = cfg.base_width << s;
      const int stride = (s > 0 && b == 0) ? 2 : 1;
      Img t = relu(w.bn(n + ".bn1").apply(conv(h, w.p.at(n + ".conv1.weight"), 3, stride, 1)));
      t = w.bn(n + ".bn2").apply(conv(t, w.p.at(n + ".conv2.weight"), 3, 1, 1));
      const Img sc = (stride != 1 || in != out) ? w.bn(n + ".down.bn").apply(conv(h, w.p.at(n + ".down.conv.weight"), 1, stride, 0)) : h;
      h = relu(add(t, sc));
      in = out;
    }
  }
  std::vector<double> emb;
  for (const auto& c : h) {
    double s = 0;
    for (const auto& r : c)
      for (double t : r) s += t;
    emb.push_back(s / static_cast<double>(c.size() * c[0].size()));
  }
  return emb;
}

nn::BackboneConfig tinyBackbone() {
  nn::BackboneConfig c;
  c.base_width = 2;
  c.blocks = {1, 1, 1, 1};
  return c;
}

void randomizeRunningStats(nn::Backbone<double>& net, Rng& rng) {
  nn::BufferList<double> bufs;
  net.collectBuffers(bufs);
  for (auto* b : bufs) {
    for (Eigen::Index i = 0; i < b->value.size(); ++i) {
      const bool var = b->name.find("running_var") != std::string::npos;
      b->value.data()[i] = var ? rng.uniform(0.5, 2.0) : rng.uniform(-0.3, 0.3);
    }
  }
  nn::ParameterList<double> params;
  net.collect(params);
  for (auto* p : params)
    if (p->name.find("beta") != std::string::npos) nn::initNormal(p->value, rng, 0.1);
}

TEST(Backbone, MatchesDirectLoopReference) {
  Rng rng(1);
  nn::Backbone<double> net(tinyBackbone(), "bb", rng);
  randomizeRunningStats(net, rng);
  Tensor<double> x({2, 3, 20, 20});
  for (auto& v : x.values()) v = rng.uniform();
  const Mat emb = net.forward(x, false);
  ASSERT_EQ(emb.cols(), 16);
  for (int n = 0; n < 2; ++n) {
    Img image(3, std::vector<std::vector<double>>(20, std::vector<double>(20)));
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) image[c][i][j] = x(n, c, i, j);
    const auto ref = referenceForward(net, image);
    for (int k = 0; k < 16; ++k) EXPECT_NEAR(emb(n, k), ref[static_cast<std::size_t>(k)], 1e-10);
  }
}

// 1x1 convolution, unit batch norm, no residual stages: the embedding of the
// 2x2 image [[1,-2],[3,4]] with weight 0.5 is mean(relu(0.5 x)) / sqrt(1 + eps)
// = (0.5 + 0 + 1.5 + 2) / 4 / sqrt(1.00001).
TEST(Backbone, HandComputedStub) {
  nn::BackboneConfig cfg;
  cfg.in_channels = 1;
  cfg.base_width = 1;
  cfg.blocks = {0, 0, 0, 0};
  cfg.stem_kernel = 1;
  cfg.stem_stride = 1;
  cfg.stem_pool = false;
  Rng rng(2);
  nn::Backbone<double> net(cfg, "bb", rng);
  nn::ParameterList<double> params;
  net.collect(params);
  params[0]->value(0, 0) = 0.5;
  Tensor<double> x({1, 1, 2, 2}, {1, -2, 3, 4});
  const Mat emb = net.forward(x, false);
  ASSERT_EQ(emb.cols(), 1);
  EXPECT_NEAR(emb(0, 0), 1.0 / std::sqrt(1.00001), 1e-12);
}

TEST(Backbone, DefaultEmbeddingIs512) {
  EXPECT_EQ(nn::BackboneConfig{}.embeddingDim(), 512);
}

TEST(Backbone, GradientsMatchFiniteDifferences) {
  Rng rng(3);
  nn::Backbone<double> net(tinyBackbone(), "bb", rng);
  // Large enough that the last stage still has 2x2 maps for batch statistics.
  Tensor<double> x({2, 3, 64, 64});
  for (auto& v : x.values()) v = rng.uniform();
  Mat probe(2, 16);
  nn::initNormal(probe, rng, 1.0);
  auto loss = [&] { return net.forward(x, true).cwiseProduct(probe).sum(); };
  nn::ParameterList<double> params;
  net.collect(params);
  nn::zeroGrads(params);
  net.forward(x, true);
  const Tensor<double> dx = net.backward(probe);
  for (auto* p : params) {
    const Mat g = p->grad;
    EXPECT_LT(test::gradientRelativeError(p->value, g, loss, 10), 1e-4) << p->name;
  }
  Mat xin = Eigen::Map<Mat>(x.data(), 1, static_cast<Eigen::Index>(x.size()));
  Mat dxin = Eigen::Map<const Mat>(dx.data(), 1, static_cast<Eigen::Index>(dx.size()));
  auto input_loss = [&] {
    std::copy(xin.data(), xin.data() + xin.size(), x.data());
    return loss();
  };
  EXPECT_LT(test::gradientRelativeError(xin, dxin, input_loss, 30), 1e-4);
}

TEST(Backbone, EvalModeGradientsMatchFiniteDifferences) {
  Rng rng(4);
  nn::Backbone<double> net(tinyBackbone(), "bb", rng);
  randomizeRunningStats(net, rng);
  Tensor<double> x({1, 3, 16, 16});
  for (auto& v : x.values()) v = rng.uniform();
  Mat probe(1, 16);
  nn::initNormal(probe, rng, 1.0);
  auto loss = [&] { return net.forward(x, false).cwiseProduct(probe).sum(); };
  nn::ParameterList<double> params;
  net.collect(params);
  nn::zeroGrads(params);
  net.forward(x, false);
  net.backward(probe);
  for (auto* p : params) {
    const Mat g = p->grad;
    EXPECT_LT(test::gradientRelativeError(p->value, g, loss, 10), 1e-4) << p->name;
  }
}

TEST(ImageEncoder, DeterministicForSeed) {
  Rng a(5), b(5);
  ImageEncoder<float> ea(tinyBackbone(), "e", a), eb(tinyBackbone(), "e", b);
  Tensor<float> x({1, 3, 32, 32});
  Rng r(6);
  for (auto& v : x.values()) v = static_cast<float>(r.uniform());
  EXPECT_EQ(ea.encodeImages(x, false), eb.encodeImages(x, false));
}

TEST(ImageEncoder, ZeroImageIsFinite) {
  Rng rng(7);
  ImageEncoder<float> enc(nn::BackboneConfig{}, "e", rng);
  const auto emb = enc.encodeImages(Tensor<float>({1, 3, 64, 64}), false);
  EXPECT_EQ(emb.cols(), 512);
  EXPECT_TRUE(emb.allFinite());
}

TEST(ImageEncoder, RejectsWrongShape) {
  Rng rng(8);
  ImageEncoder<float> enc(tinyBackbone(), "e", rng);
  try {
    enc.encodeImages(Tensor<float>({1, 1, 16, 16}), false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  try {
    enc.encodeViews(Tensor<float>({1, 3, 16, 16}), false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

Tensor<double> frame(Rng& rng, std::size_t size) {
  Tensor<double> f({3, size, size});
  for (auto& v : f.values()) v = rng.uniform();
  return f;
}

Tensor<double> stack(const std::vector<const Tensor<double>*>& frames) {
  const std::size_t per = frames[0]->size();
  Tensor<double> out({1, frames.size(), 3, frames[0]->dim(1), frames[0]->dim(2)});
  for (std::size_t i = 0; i < frames.size(); ++i) std::copy(frames[i]->data(), frames[i]->data() + per, out.data() + i * per);
  return out;
}

Tensor<double> single(const Tensor<double>& f) {
  Tensor<double> out = f;
  out.reshape({1, 3, f.dim(1), f.dim(2)});
  return out;
}

TEST(ImageEncoder, IdenticalViewsEqualSingleFrame) {
  Rng rng(9);
  ImageEncoder<double> enc(tinyBackbone(), "e", rng);
  const auto f = frame(rng, 24);
  const Mat one = enc.encodeImages(single(f), false);
  const Mat ten = enc.encodeViews(stack(std::vector<const Tensor<double>*>(10, &f)), false);
  EXPECT_LT((one - ten).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ImageEncoder, ViewPoolingIsPermutationInvariantMean) {
  Rng rng(10);
  ImageEncoder<double> enc(tinyBackbone(), "e", rng);
  std::vector<Tensor<double>> frames;
  for (int i = 0; i < 10; ++i) frames.push_back(frame(rng, 24));
  std::vector<const Tensor<double>*> order;
  for (auto& f : frames) order.push_back(&f);
  const Mat base = enc.encodeViews(stack(order), false);
  Mat mean = Mat::Zero(1, base.cols());
  for (auto& f : frames) mean += enc.encodeImages(single(f), false) / 10.0;
  EXPECT_LT((base - mean).cwiseAbs().maxCoeff(), 1e-12);
  for (int trial = 0; trial < 5; ++trial) {
    rng.shuffle(order.begin(), order.end());
    EXPECT_LT((enc.encodeViews(stack(order), false) - base).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ImageEncoder, TwoDistinctFramesAverage) {
  Rng rng(11);
  ImageEncoder<double> enc(tinyBackbone(), "e", rng);
  const auto a = frame(rng, 24);
  const auto b = frame(rng, 24);
  std::vector<const Tensor<double>*> order;
  for (int i = 0; i < 5; ++i) {
    order.push_back(&a);
    order.push_back(&b);
  }
  const Mat pooled = enc.encodeViews(stack(order), false);
  const Mat expected = (enc.encodeImages(single(a), false) + enc.encodeImages(single(b), false)) / 2.0;
  EXPECT_LT((pooled - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ImageEncoder, NormalizationUsesChannelStatistics) {
  Rng rng(12);
  ImageEncoder<double> enc(tinyBackbone(), "e", rng);
  Tensor<double> x({4, 3, 8, 8});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>((i / 64) % 3) + 0.5 * ((i % 2) ? 1 : -1);
  enc.fitNormalization(x);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(enc.mean.value(0, c), c, 1e-12);
    EXPECT_NEAR(enc.stddev.value(0, c), 0.5, 1e-12);
  }
}

TEST(PairVisual, ConcatenatesInOrder) {
  Mat a(1, 512), b(1, 512);
  Rng rng(13);
  nn::initNormal(a, rng, 1.0);
  nn::initNormal(b, rng, 1.0);
  const Mat ab = pairVisual(a, b);
  ASSERT_EQ(ab.cols(), 1024);
  EXPECT_EQ(ab.leftCols(512), a);
  EXPECT_EQ(ab.rightCols(512), b);
  EXPECT_NE(ab, pairVisual(b, a));
  EXPECT_EQ(pairVisual<double>(Mat::Zero(1, 512), Mat::Zero(1, 512)), Mat(Mat::Zero(1, 1024)));
  try {
    pairVisual(a, Mat(1, 511));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

}  // namespace
}  // namespace ddi::model
