// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "ddi/common/error.hpp"
#include "ddi/model/ddi_model.hpp"
#include "ddi/nn/adam.hpp"
#include "ddi/nn/checkpoint.hpp"

namespace ddi::nn {
namespace {

// Value from tests/oracles/nn_oracles.py (adam_two_steps).
TEST(Adam, TwoStepsOnScalar) {
  Parameter<double> p("p", 1, 1);
  p.value(0, 0) = 1.0;
  Adam<double> adam({0.1, 0.9, 0.999, 1e-8, 0.01});
  p.grad(0, 0) = 0.5;
  adam.step({&p});
  p.grad(0, 0) = -0.2;
  adam.step({&p});
  EXPECT_NEAR(p.value(0, 0), 0.8633641380701821, 1e-12);
  EXPECT_EQ(adam.steps(), 2);
}

TEST(Adam, ZeroLearningRateLeavesParameters) {
  Parameter<float> p("p", 3, 4);
  Rng rng(1);
  initNormal(p.value, rng, 1.0);
  initNormal(p.grad, rng, 1.0);
  const Matrix<float> before = p.value;
  Adam<float> adam({0.0, 0.9, 0.999, 1e-8, 1e-6});
  adam.step({&p});
  EXPECT_EQ(p.value, before);
}

TEST(Adam, SkipsFrozenParameters) {
  Parameter<float> p("p", 1, 2);
  p.trainable = false;
  p.grad.setOnes();
  Adam<float> adam;
  adam.step({&p});
  EXPECT_EQ(p.value, Matrix<float>::Zero(1, 2));
}

std::string tempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ddi_test_" + name)).string();
}

TEST(Checkpoint, RoundTripReproducesForward) {
  model::ModelConfig cfg;
  cfg.fusion.num_layers = 1;
  cfg.fusion.num_heads = 2;
  cfg.fusion.hidden = 8;
  cfg.fusion.per_drug_len = 2;
  cfg.fusion.vocab_size = 5;
  cfg.fusion.num_classes = 3;
  cfg.backbone.base_width = 1;
  cfg.backbone.blocks = {1, 1, 0, 0};
  model::DdiModel<float> a(cfg, 1);
  model::DdiModel<float> b(cfg, 2);
  Adam<float> adam;
  Rng rng(3);
  for (auto* p : a.trainableParameters()) initNormal(p->grad, rng, 1.0);
  adam.step(a.trainableParameters());

  const chem::PairSequence pair = chem::joinPair({"x", {2, 3}, 2}, {"y", {4, 0}, 1});
  model::ModelBatch<float> batch;
  batch.pairs = model::makeBatch({&pair});
  batch.images = Tensor<float>({2, 3, 32, 32});
  for (auto& v : batch.images.values()) v = static_cast<float>(rng.uniform());
  batch.x_index = {0};
  batch.y_index = {1};
  a.forward(batch, true);  // moves running statistics

  CheckpointData data;
  data.meta["note"] = "test";
  storeState(data, a.allParameters(), a.buffers(), &adam);
  const std::string path = tempPath("ckpt.bin");
  writeCheckpoint(path, data);
  const CheckpointData loaded = readCheckpoint(path);
  EXPECT_EQ(loaded.meta.at("note"), "test");
  Adam<float> adam2;
  loadState(loaded, b.allParameters(), b.buffers(), &adam2);
  EXPECT_EQ(adam2.steps(), 1);
  EXPECT_EQ(adam2.state().size(), adam.state().size());
  EXPECT_EQ(a.forward(batch, false), b.forward(batch, false));
  std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsShapeMismatch) {
  CheckpointData data;
  data.tensors["param/w"] = Matrix<float>::Zero(2, 2);
  Parameter<float> p("w", 3, 2);
  try {
    loadState<float>(data, {&p}, {}, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDataError);
  }
}

TEST(Checkpoint, RejectsForeignFile) {
  const std::string path = tempPath("not_ckpt.bin");
  {
    std::ofstream out(path);
    out << "hello world, not a checkpoint";
  }
  try {
    readCheckpoint(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDataError);
  }
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace ddi::nn
