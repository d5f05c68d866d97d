// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "ddi/common/error.hpp"
#include "ddi/model/head.hpp"
#include "grad_check.hpp"

namespace ddi::model {
namespace {

using Mat = Matrix<double>;

TEST(PredictionHead, ZeroWeightsGiveUniform) {
  Rng rng(1);
  PredictionHead<double> head(8, 4, rng);
  nn::ParameterList<double> params;
  head.collect(params);
  for (auto* p : params) p->value.setZero();
  Mat z(2, 8);
  nn::initNormal(z, rng, 1.0);
  for (const auto& p : predictions(head.forward(z))) {
    for (double v : p.probs) EXPECT_DOUBLE_EQ(v, 0.25);
  }
}

// Values from tests/oracles/nn_oracles.py (head_instance).
TEST(PredictionHead, HandSetInstance) {
  Rng rng(2);
  PredictionHead<double> head(2, 2, rng);
  head.residual.weight.value << 0.5, -0.25, 0.1, 0.3;
  head.residual.bias.value << 0.05, -0.1;
  head.fc1.weight.value << 1.0, -0.5, 0.25, 0.75;
  head.fc1.bias.value << 0.0, 0.2;
  head.fc2.weight.value << 0.6, -0.4, -0.3, 0.9;
  head.fc2.bias.value << 0.1, -0.05;
  Mat z(1, 2);
  z << 0.7, -1.2;
  const auto p = predictions(head.forward(z))[0];
  EXPECT_NEAR(p.probs[0], 0.6617829985847941, 1e-12);
  EXPECT_NEAR(p.probs[1], 0.338217001415206, 1e-12);
  EXPECT_EQ(p.label, 0);
}

TEST(PredictionHead, ProbabilitiesSumToOneAndShiftInvariant) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Mat logits(3, 5);
    nn::initNormal(logits, rng, 5.0);
    const auto a = predictions(logits);
    Mat shifted = logits.array() + rng.uniform(-100, 100);
    const auto b = predictions(shifted);
    for (std::size_t i = 0; i < a.size(); ++i) {
      double s = 0;
      for (std::size_t k = 0; k < 5; ++k) {
        s += a[i].probs[k];
        EXPECT_GE(a[i].probs[k], 0.0);
        EXPECT_NEAR(a[i].probs[k], b[i].probs[k], 1e-6);
      }
      EXPECT_NEAR(s, 1.0, 1e-6);
      EXPECT_EQ(a[i].label, std::max_element(a[i].probs.begin(), a[i].probs.end()) - a[i].probs.begin());
    }
  }
}

TEST(PredictionHead, GradientsMatchFiniteDifferences) {
  Rng rng(4);
  PredictionHead<double> head(6, 3, rng);
  Mat z(4, 6);
  nn::initNormal(z, rng, 1.0);
  const std::vector<int> labels{0, 2, 1, 2};
  auto loss = [&] { return crossEntropy(nn::softmaxRows(head.forward(z)), labels); };
  nn::ParameterList<double> params;
  head.collect(params);
  nn::zeroGrads(params);
  const Mat dz = head.backward(crossEntropyLogitGrad(nn::softmaxRows(head.forward(z)), labels));
  for (auto* p : params) {
    const Mat g = p->grad;
    EXPECT_LT(test::gradientRelativeError(p->value, g, loss), 1e-4) << p->name;
  }
  EXPECT_LT(test::gradientRelativeError(z, dz, loss), 1e-4);
}

TEST(CrossEntropy, PerfectPredictionsGiveZero) {
  Mat p = Mat::Zero(3, 3);
  p(0, 1) = p(1, 0) = p(2, 2) = 1;
  EXPECT_EQ(crossEntropy(p, {1, 0, 2}), 0.0);
}

TEST(CrossEntropy, UniformFourClasses) {
  const Mat p = Mat::Constant(5, 4, 0.25);
  EXPECT_NEAR(crossEntropy(p, {0, 1, 2, 3, 0}), std::log(4.0), 1e-12);
}

TEST(CrossEntropy, MixedBatchIsMeanOfRows) {
  Mat p(3, 3);
  p << 0.7, 0.2, 0.1, 0.1, 0.3, 0.6, 0.25, 0.5, 0.25;
  const double per_row = (-std::log(0.7) - std::log(0.3) - std::log(0.25)) / 3;
  EXPECT_NEAR(crossEntropy(p, {0, 1, 2}), per_row, 1e-15);
  EXPECT_NEAR(crossEntropy(p, {0, 1, 2}), 0.9823140364615197, 1e-12);
}

TEST(CrossEntropy, ZeroProbabilityIsFloored) {
  Mat p(1, 2);
  p << 1.0, 0.0;
  EXPECT_NEAR(crossEntropy(p, {1}), -std::log(kProbabilityFloor), 1e-9);
}

TEST(CrossEntropy, DecreasesAsTrueMassGrows) {
  double previous = 1e9;
  for (double q = 0.05; q < 1.0; q += 0.05) {
    Mat p(1, 3);
    p << q, (1 - q) / 2, (1 - q) / 2;
    const double loss = crossEntropy(p, {0});
    EXPECT_LT(loss, previous);
    EXPECT_GT(loss, 0.0);
    previous = loss;
  }
}

TEST(CrossEntropy, RejectsBadLabels) {
  const Mat p = Mat::Constant(1, 3, 1.0 / 3);
  try {
    crossEntropy(p, {3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIndexOutOfRange);
  }
}

}  // namespace
}  // namespace ddi::model
