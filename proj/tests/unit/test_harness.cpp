// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "ddi/common/error.hpp"
#include "ddi/common/hashing.hpp"
#include "ddi/common/random.hpp"
#include "ddi/harness/experiment.hpp"
#include "ddi/harness/explain.hpp"
#include "ddi/harness/image_store.hpp"
#include "ddi/harness/session.hpp"
#include "ddi/harness/tsne.hpp"
#include "test_support.hpp"

using namespace ddi;
using namespace ddi::harness;
namespace fs = std::filesystem;

namespace {

ErrorCode codeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ddi_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small enough to train in a second or two on one core.
RunConfig tinyConfig(const std::string& modality) {
  RunConfig c;
  c.drugs = test::dataPath("drugs.tsv");
  c.interactions = test::dataPath("interactions.tsv");
  c.modality = modality;
  c.num_layers = 2;
  c.num_heads = 2;
  c.node_hidden = 16;
  c.seq_len = 8;
  c.batch_size = 8;
  c.epoch = 2;
  c.backbone.base_width = 4;
  c.backbone.blocks = {1, 1, 0, 0};
  c.imaging.render_size = 64;
  c.imaging.crop_size = 48;
  c.imaging.frames = 2;
  c.imaging.view_size = 32;
  c.imaging.raw_width = 64;
  c.imaging.raw_height = 48;
  return c;
}

struct Fixture {
  RunConfig config;
  data::DdiDataset dataset;
  chem::MotifVocabulary vocab;
  nlohmann::json split;

  explicit Fixture(const std::string& modality) : config(tinyConfig(modality)) {
    dataset = loadConfiguredDataset(config);
    vocab = resolveVocabulary(config, dataset);
    split = makeSplit(config, dataset, 0);
  }
  std::vector<std::size_t> bucket(const std::string& name) const { return data::bucketFromJson(split, name); }
};

std::map<std::string, Matrix<float>> snapshot(model::DdiModel<float>& m) {
  std::map<std::string, Matrix<float>> out;
  for (auto* p : m.allParameters()) out[p->name] = p->value;
  return out;
}

bool anyChanged(const std::map<std::string, Matrix<float>>& before, model::DdiModel<float>& m, const std::string& prefix) {
  for (auto* p : m.allParameters()) {
    if (p->name.rfind(prefix, 0) == 0 && p->value != before.at(p->name)) return true;
  }
  return false;
}

// Mean silhouette coefficient, computed directly from its definition.
double silhouette(const Matrix<double>& pts, const std::vector<int>& labels) {
  const auto n = pts.rows();
  std::set<int> classes(labels.begin(), labels.end());
  double total = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::map<int, std::pair<double, int>> acc;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      auto& a = acc[labels[static_cast<std::size_t>(j)]];
      a.first += (pts.row(i) - pts.row(j)).norm();
      a.second += 1;
    }
    const int own = labels[static_cast<std::size_t>(i)];
    const double a = acc[own].first / acc[own].second;
    double b = INFINITY;
    for (int c : classes)
      if (c != own) b = std::min(b, acc[c].first / acc[c].second);
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

}  // namespace

TEST(RunConfig, DefaultsFollowHyperparameterTable) {
  const RunConfig c;
  EXPECT_EQ(c.num_layers, 6);
  EXPECT_EQ(c.num_heads, 8);
  EXPECT_EQ(c.node_hidden, 512);
  EXPECT_DOUBLE_EQ(c.lr, 1e-3);
  EXPECT_DOUBLE_EQ(c.weight_decay, 1e-6);
  EXPECT_EQ(c.seq_len, 16);
  EXPECT_EQ(c.epoch, 100);
  EXPECT_EQ(c.batch_size, 128);
  EXPECT_EQ(c.patience, 20);
  EXPECT_EQ(c.modality, "2d");
  EXPECT_TRUE(c.split.resplit_per_seed);
}

TEST(RunConfig, JsonRoundTripAndHash) {
  RunConfig c = tinyConfig("3d");
  c.seeds = {1, 2, 3};
  const RunConfig back = RunConfig::fromJson(c.toJson());
  EXPECT_EQ(back.toJson(), c.toJson());
  EXPECT_EQ(back.hash(), c.hash());
  c.lr = 5e-4;
  EXPECT_NE(back.hash(), c.hash());
}

TEST(RunConfig, RejectsBadInput) {
  EXPECT_EQ(codeOf([] { RunConfig::fromJson({{"learning_rate", 0.1}}); }), ErrorCode::kConfigError);
  EXPECT_EQ(codeOf([] { RunConfig::fromJson({{"split", {{"ratio", 0.1}}}}); }), ErrorCode::kConfigError);
  EXPECT_EQ(codeOf([] { RunConfig::fromJson({{"epoch", 101}}); }), ErrorCode::kConfigError);
  EXPECT_EQ(codeOf([] { RunConfig::fromJson({{"epoch", "ten"}}); }), ErrorCode::kConfigError);
  EXPECT_EQ(codeOf([] { RunConfig::fromJson({{"modality", "4d"}}); }), ErrorCode::kConfigError);
  EXPECT_EQ(codeOf([] { RunConfig::fromJson({{"node_hidden", 30}, {"num_heads", 8}}); }), ErrorCode::kConfigError);
  EXPECT_NO_THROW(RunConfig::fromJson({{"epoch", 150}, {"max_epochs", 200}}));
}

TEST(RunConfig, RelativePathsResolveAgainstConfigFile) {
  const fs::path dir = scratch("cfg");
  writeFile(dir / "run.json", R"({"drugs": "data/drugs.tsv", "output": "/abs/out"})");
  const RunConfig c = RunConfig::load(dir / "run.json");
  EXPECT_EQ(c.drugs, (dir / "data/drugs.tsv").string());
  EXPECT_EQ(c.output, "/abs/out");
}

TEST(ImageStore, AugmentationIsSeededPerEpochAndDrug) {
  const Fixture f("2d");
  ImageStore store(f.config, f.dataset);
  const std::vector<std::string> ids{"aspirin", "caffeine"};
  const auto a = store.batch(ids, true, 7, 1);
  const auto b = store.batch(ids, true, 7, 1);
  EXPECT_EQ(a.shape(), (Tensor<float>::Shape{2, 3, 48, 48}));
  EXPECT_EQ(a.storage(), b.storage());
  bool differs = false;
  for (int epoch = 2; epoch < 8 && !differs; ++epoch) differs = store.batch(ids, true, 7, epoch).storage() != a.storage();
  EXPECT_TRUE(differs);
  // evaluation is a plain center crop, independent of seed and epoch
  EXPECT_EQ(store.batch(ids, false, 1, 1).storage(), store.batch(ids, false, 9, 5).storage());
}

TEST(ImageStore, CachedRendersAreUsed) {
  Fixture f("2d");
  const fs::path dir = scratch("cache");
  fs::create_directories(dir / "2d");
  ImageStore fresh(f.config, f.dataset);
  imaging::Image8 marker = fresh.base2d("aspirin");
  marker.set(0, 0, {1, 2, 3});
  imaging::writePng((dir / "2d" / "aspirin.png").string(), marker);
  f.config.images = dir.string();
  ImageStore cached(f.config, f.dataset);
  EXPECT_EQ(cached.base2d("aspirin"), marker);
  EXPECT_EQ(cached.base2d("caffeine"), fresh.base2d("caffeine"));
}

TEST(Session, ZeroLearningRateLeavesParametersUnchanged) {
  Fixture f("2d");
  f.config.lr = 0;
  f.config.epoch = 1;
  Session s(f.config, f.dataset, f.vocab, 3);
  const auto before = snapshot(s.model());
  s.train(f.bucket("train"), f.bucket("valid"), "");
  for (auto* p : s.model().allParameters()) EXPECT_TRUE(p->value == before.at(p->name)) << p->name;
}

TEST(Session, EncoderAndTransformerBothLearn) {
  Fixture f("2d");
  f.config.epoch = 1;
  Session s(f.config, f.dataset, f.vocab, 3);
  const auto before = snapshot(s.model());
  s.train(f.bucket("train"), f.bucket("valid"), "");
  EXPECT_TRUE(anyChanged(before, s.model(), "encoder2d."));
  EXPECT_TRUE(anyChanged(before, s.model(), "layer0."));
  EXPECT_TRUE(anyChanged(before, s.model(), "bias_projector"));
  EXPECT_TRUE(anyChanged(before, s.model(), "head."));
}

TEST(Session, FrozenEncoderStaysFixed) {
  Fixture f("2d");
  f.config.epoch = 1;
  f.config.freeze_encoder = true;
  Session s(f.config, f.dataset, f.vocab, 3);
  const auto before = snapshot(s.model());
  s.train(f.bucket("train"), f.bucket("valid"), "");
  EXPECT_FALSE(anyChanged(before, s.model(), "encoder2d."));
  EXPECT_TRUE(anyChanged(before, s.model(), "layer"));
}

TEST(Session, SameSeedGivesSameLossCurve) {
  Fixture f("2d");
  auto run = [&] {
    Session s(f.config, f.dataset, f.vocab, 11);
    return s.train(f.bucket("train"), f.bucket("valid"), "").log;
  };
  const auto a = run(), b = run();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i].train_loss, b[i].train_loss, 1e-6);
    EXPECT_NEAR(a[i].valid_macro_f1, b[i].valid_macro_f1, 1e-6);
  }
}

TEST(Session, BestCheckpointReproducesLoggedValidationScore) {
  Fixture f("2d");
  f.config.epoch = 3;
  const fs::path dir = scratch("best");
  Session s(f.config, f.dataset, f.vocab, 5);
  const auto result = s.train(f.bucket("train"), f.bucket("valid"), (dir / "best.ckpt").string());
  auto best = Session::load((dir / "best.ckpt").string(), f.dataset, &f.vocab);
  EXPECT_NEAR(best->evaluate(f.bucket("valid")).metrics.macro_f1, result.best_valid_macro_f1, 1e-12);
}

TEST(Session, CheckpointRoundTripReproducesOutputs) {
  for (const std::string modality : {"none", "2d", "3d"}) {
    Fixture f(modality);
    f.config.epoch = 1;
    const fs::path dir = scratch("roundtrip_" + modality);
    Session s(f.config, f.dataset, f.vocab, 9);
    s.train(f.bucket("train"), f.bucket("valid"), "");
    s.save((dir / "m.ckpt").string(), 1, 0.0);
    const auto test = f.bucket("test");
    const Matrix<float> before = s.forward(test, false);
    const auto metrics = s.evaluate(test).metrics;
    auto loaded = Session::load((dir / "m.ckpt").string(), f.dataset, &f.vocab);
    EXPECT_LT((loaded->forward(test, false) - before).cwiseAbs().maxCoeff(), 1e-6) << modality;
    const auto again = loaded->evaluate(test).metrics;
    EXPECT_NEAR(again.accuracy, metrics.accuracy, 1e-6);
    EXPECT_NEAR(again.macro_f1, metrics.macro_f1, 1e-6);
    EXPECT_EQ(loaded->optimizer().steps(), s.optimizer().steps());
    EXPECT_EQ(loaded->config().hash(), f.config.hash());
  }
}

TEST(Session, VocabularyMismatchIsRejected) {
  Fixture f("none");
  const fs::path dir = scratch("vocab");
  Session s(f.config, f.dataset, f.vocab, 1);
  s.save((dir / "m.ckpt").string(), 0, 0.0);
  chem::MotifVocabulary other = f.vocab;
  other.add("[1*]C(F)(F)F");
  EXPECT_EQ(codeOf([&] { Session::load((dir / "m.ckpt").string(), f.dataset, &other); }), ErrorCode::kVocabularyMismatch);
}

TEST(Session, EmptySplitRaisesEmptyInput) {
  Fixture f("none");
  Session s(f.config, f.dataset, f.vocab, 1);
  EXPECT_EQ(codeOf([&] { s.evaluate({}); }), ErrorCode::kEmptyInput);
  EXPECT_EQ(codeOf([&] { s.train({}, f.bucket("valid"), ""); }), ErrorCode::kEmptyInput);
}

TEST(Session, VocabSizeSmallerThanVocabularyIsConfigError) {
  Fixture f("none");
  f.config.vocab_size = 3;
  EXPECT_EQ(codeOf([&] { Session(f.config, f.dataset, f.vocab, 1); }), ErrorCode::kConfigError);
}

// Labels drawn independently of the (untrained) model: the number of hits is
// Binomial(n, 1/4), so accuracy stays within 4 standard deviations of 0.25.
TEST(Session, UntrainedModelIsAtChanceOnBalancedFourClassToy) {
  data::DdiDataset ds;
  ds.drugs = data::loadDataset(test::dataPath("drugs.tsv"), test::dataPath("interactions.tsv")).drugs;
  ds.num_events = 4;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < static_cast<int>(ds.drugs.size()); ++i)
    for (int j = i + 1; j < static_cast<int>(ds.drugs.size()); ++j) pairs.emplace_back(i, j);
  Rng rng(2024);
  rng.shuffle(pairs.begin(), pairs.end());
  pairs.resize(400);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    ds.interactions.push_back({ds.drugs[static_cast<std::size_t>(pairs[k].first)].drug_id,
                               ds.drugs[static_cast<std::size_t>(pairs[k].second)].drug_id, static_cast<int>(k % 4)});
  }
  // shuffle labels so they are unrelated to the pair order
  std::vector<int> events;
  for (const auto& it : ds.interactions) events.push_back(it.event);
  rng.shuffle(events.begin(), events.end());
  for (std::size_t k = 0; k < events.size(); ++k) ds.interactions[k].event = events[k];
  ds.reindex();

  RunConfig config = tinyConfig("none");
  config.batch_size = 64;
  const auto vocab = chem::MotifVocabulary::build(ds.drugs);
  std::vector<std::size_t> all(ds.interactions.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const double sd = std::sqrt(0.25 * 0.75 / 400.0);
  double mean_acc = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Session s(config, ds, vocab, seed);
    const double acc = s.evaluate(all).metrics.accuracy;
    EXPECT_NEAR(acc, 0.25, 4 * sd) << "seed " << seed;
    mean_acc += acc / 5;
  }
  EXPECT_NEAR(mean_acc, 0.25, 4 * sd / std::sqrt(5.0));
}

TEST(Session, NoneModalityEqualsZeroedTwoDimensionalRun) {
  Fixture none("none"), two("2d");
  Session a(none.config, none.dataset, none.vocab, 4);
  Session b(two.config, two.dataset, two.vocab, 4);
  b.model().fusion().projector.weight.value.setZero();
  b.model().fusion().projector.bias.value.setZero();
  const auto test = none.bucket("test");
  EXPECT_LT((a.forward(test, false) - b.forward(test, false)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Attention, ReductionOnHandSetHeads) {
  // L = 2: slots 0,1 for x and 2,3 for y; slot 1 is padding.
  const std::vector<bool> mask{true, false, true, true};
  MatrixD h0(4, 4), h1(4, 4);
  h0 << 0.5, 0, 0.25, 0.25,  //
      0.2, 0, 0.4, 0.4,      // padded query, dropped
      0.1, 0, 0.6, 0.3,      //
      0.3, 0, 0.3, 0.4;
  h1 << 0.1, 0, 0.5, 0.4,  //
      0.2, 0, 0.4, 0.4,    //
      0.3, 0, 0.2, 0.5,    //
      0.5, 0, 0.1, 0.4;
  AttentionExplanation e;
  reduceAttention({h0, h1}, mask, 2, e);
  EXPECT_EQ(e.queries, (std::vector<int>{0, 2, 3}));
  ASSERT_EQ(e.table.rows(), 3);
  EXPECT_NEAR(e.table(0, 0), 0.3, 1e-12);
  EXPECT_NEAR(e.table(1, 2), 0.4, 1e-12);
  EXPECT_NEAR(e.table(2, 3), 0.4, 1e-12);
  for (Eigen::Index r = 0; r < 3; ++r) EXPECT_NEAR(e.table.row(r).sum(), 1.0, 1e-12);
  // x has one real motif, so it takes the whole block
  EXPECT_EQ(e.weights_x, std::vector<double>{1.0});
  // y column means: slot 2 = (0.375 + 0.4 + 0.2)/3, slot 3 = (0.325 + 0.4 + 0.4)/3
  ASSERT_EQ(e.weights_y.size(), 2u);
  EXPECT_NEAR(e.weights_y[0], 0.975 / 2.1, 1e-12);
  EXPECT_NEAR(e.weights_y[1], 1.125 / 2.1, 1e-12);
}

TEST(Attention, ExplainPairOnModel) {
  Fixture f("2d");
  Session s(f.config, f.dataset, f.vocab, 2);
  const auto e = explainAttention(s, "aspirin", "caffeine");
  EXPECT_EQ(e.motifs_y, std::vector<std::string>{chem::decompose(f.dataset.drug("caffeine").smiles)});
  EXPECT_EQ(e.weights_y, std::vector<double>{1.0});  // caffeine is a single motif
  EXPECT_EQ(e.motifs_x.size(), 4u);
  double sum_x = 0;
  for (double w : e.weights_x) sum_x += w;
  EXPECT_NEAR(sum_x, 1.0, 1e-9);
  for (Eigen::Index r = 0; r < e.table.rows(); ++r) EXPECT_NEAR(e.table.row(r).sum(), 1.0, 1e-5);
  EXPECT_NE(attentionSvg(e).find("<svg"), std::string::npos);
  EXPECT_TRUE(e.toJson().contains("query_table"));
}

TEST(Attention, BiasChangesTheTable) {
  Fixture f("2d");
  Session s(f.config, f.dataset, f.vocab, 2);
  const auto biased = explainAttention(s, "aspirin", "warfarin");
  s.model().fusion().projector.weight.value.setZero();
  s.model().fusion().projector.bias.value.setZero();
  const auto plain = explainAttention(s, "aspirin", "warfarin");
  EXPECT_GT((biased.table - plain.table).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(GradCam, HandDerivedStub) {
  Tensor<float> a({1, 2, 2, 2}), g({1, 2, 2, 2});
  // channel 0: activations 1..4, gradient 0.5 everywhere -> alpha 0.5
  // channel 1: activation 3 at (0,1), gradient mean -1 -> alpha -1
  const float av[] = {1, 2, 3, 4, 0, 3, 0, 0};
  const float gv[] = {0.5f, 0.5f, 0.5f, 0.5f, -2, 0, 0, -2};
  std::copy(av, av + 8, a.data());
  std::copy(gv, gv + 8, g.data());
  const MatrixD raw = gradCamRaw(a, g, 0);
  // 0.5 * A0 - A1 = [[0.5, -2], [1.5, 2]], then ReLU
  EXPECT_DOUBLE_EQ(raw(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(raw(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(raw(1, 0), 1.5);
  EXPECT_DOUBLE_EQ(raw(1, 1), 2.0);
  const MatrixD s = normalizeSaliency(raw);
  EXPECT_DOUBLE_EQ(s(0, 0), 0.0);  // 0.25 falls under the threshold
  EXPECT_DOUBLE_EQ(s(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(s(1, 0), 0.75);
  EXPECT_DOUBLE_EQ(s(1, 1), 1.0);
}

TEST(GradCam, ConstantMapNormalizesToZero) {
  const MatrixD flat = MatrixD::Constant(3, 3, 0.7);
  EXPECT_EQ(normalizeSaliency(flat), MatrixD::Zero(3, 3));
}

TEST(GradCam, SaliencyRangeAndThreshold) {
  Rng rng(5);
  MatrixD raw(7, 7);
  for (Eigen::Index i = 0; i < raw.size(); ++i) raw.data()[i] = rng.uniform();
  const MatrixD s = normalizeSaliency(raw, 0.5);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double v = s.data()[i];
    EXPECT_TRUE(v == 0.0 || (v >= 0.5 && v <= 1.0)) << v;
  }
  EXPECT_DOUBLE_EQ(s.maxCoeff(), 1.0);
}

TEST(GradCam, RequiresThreeDimensionalCheckpoint) {
  Fixture f("2d");
  Session s(f.config, f.dataset, f.vocab, 1);
  EXPECT_EQ(codeOf([&] { explainGradCam(s, "aspirin", "caffeine", {0}); }), ErrorCode::kModalityMismatch);
}

TEST(GradCam, ThreeDimensionalSessionProducesOverlays) {
  for (bool frozen : {false, true}) {
    Fixture f("3d");
    f.config.freeze_encoder = frozen;
    Session s(f.config, f.dataset, f.vocab, 1);
    const auto r = explainGradCam(s, "aspirin", "caffeine", {0, 1});
    ASSERT_EQ(r.frames.size(), 4u);
    bool any = false;
    for (const auto& fr : r.frames) {
      EXPECT_EQ(fr.overlay.height, 32);
      EXPECT_GE(fr.saliency.minCoeff(), 0.0);
      EXPECT_LE(fr.saliency.maxCoeff(), 1.0);
      any = any || fr.saliency.maxCoeff() == 1.0;
    }
    EXPECT_TRUE(any);
    EXPECT_EQ(codeOf([&] { explainGradCam(s, "aspirin", "caffeine", {2}); }), ErrorCode::kIndexOutOfRange);
  }
}

TEST(Tsne, TooFewSamples) {
  EXPECT_EQ(codeOf([] { tsne(MatrixD::Zero(1, 4)); }), ErrorCode::kTooFewSamples);
  EXPECT_EQ(codeOf([] { tsne(MatrixD::Zero(0, 4)); }), ErrorCode::kTooFewSamples);
  EXPECT_NO_THROW(tsne(MatrixD::Identity(2, 4)));
}

TEST(Tsne, AffinitiesMatchReference) {
  const auto ref = readJson(test::dataPath("tsne_affinities.json"));
  const auto rows = ref.at("x").get<std::vector<std::vector<double>>>();
  MatrixD x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  const auto expected = ref.at("p").get<std::vector<std::vector<double>>>();
  const MatrixD p = jointAffinities(x, ref.at("perplexity").get<double>());
  double peak = 0;
  for (const auto& r : expected)
    for (double v : r) peak = std::max(peak, v);
  // the reference bisects on single-precision distances
  for (std::size_t i = 0; i < expected.size(); ++i)
    for (std::size_t j = 0; j < expected.size(); ++j)
      EXPECT_NEAR(p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), expected[i][j], 1e-4 * peak);
  EXPECT_NEAR(p.sum(), 1.0, 1e-9);
}

TEST(Tsne, SeededRunsAreIdentical) {
  Rng rng(1);
  MatrixD x(30, 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  TsneParams p;
  p.iterations = 300;
  p.seed = 17;
  EXPECT_EQ(tsne(x, p), tsne(x, p));
}

// t-SNE keeps a small repulsive gap between identical inputs, so the
// property checked is that each twin is the other's nearest neighbour.
TEST(Tsne, DuplicatesAreMutualNearestNeighbours) {
  Rng rng(2);
  MatrixD x(24, 6);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 3 * rng.normal();
  x.row(5) = x.row(4);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    TsneParams p;
    p.seed = seed;
    const MatrixD y = tsne(x, p);
    const double twin = (y.row(4) - y.row(5)).norm();
    for (Eigen::Index j = 0; j < y.rows(); ++j) {
      if (j == 4 || j == 5) continue;
      EXPECT_LT(twin, (y.row(4) - y.row(j)).norm()) << "seed " << seed << " point " << j;
      EXPECT_LT(twin, (y.row(5) - y.row(j)).norm()) << "seed " << seed << " point " << j;
    }
  }
}

TEST(Tsne, SeparatedClustersStaySeparated) {
  Rng rng(3);
  const int per = 20, dim = 10;
  MatrixD x(3 * per, dim);
  std::vector<int> labels;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < per; ++i) {
      for (int d = 0; d < dim; ++d) x(c * per + i, d) = (d == c ? 10.0 : 0.0) + rng.normal();
      labels.push_back(c);
    }
  EXPECT_GT(silhouette(x, labels), 0.5);  // sanity of the input
  TsneParams p;
  p.seed = 4;
  const MatrixD y = tsne(x, p);
  EXPECT_GT(silhouette(y, labels), 0.5);
  EXPECT_NE(scatterSvg(y, labels, "clusters").find("circle"), std::string::npos);
}

TEST(Tsne, EventSelection) {
  const std::vector<int> labels{0, 0, 0, 0, 1, 1, 1, 2, 3, 3, 4, 4, 4, 4, 4};
  // counts: 0->4, 1->3, 2->1, 3->2, 4->5
  EXPECT_EQ(selectEvents(labels, 2, 1), (std::vector<int>{2, 3, 4}));
  EXPECT_EQ(selectEvents(labels, 1, 2), (std::vector<int>{0, 2, 4}));
  EXPECT_EQ(selectEvents(labels, 10, 10), (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(Experiment, MultiSeedRunWritesArtifactsAndAggregates) {
  Fixture f("none");
  f.config.seeds = {0, 1};
  f.config.epoch = 2;
  const fs::path dir = scratch("experiment");
  const auto result = runExperiment(f.config, f.dataset, f.vocab, dir);
  ASSERT_EQ(result.runs.size(), 2u);
  for (const auto& name : result.outputs) EXPECT_TRUE(fs::exists(dir / name)) << name;
  // splits are re-drawn per seed by default
  EXPECT_NE(readJson(dir / "seed_0/split.json").at("test"), readJson(dir / "seed_1/split.json").at("test"));
  const auto& summary = result.summary.at("test");
  const double acc0 = result.runs[0].metrics.at("test").accuracy, acc1 = result.runs[1].metrics.at("test").accuracy;
  EXPECT_EQ(summary[0].name, "accuracy");
  EXPECT_NEAR(summary[0].mean, (acc0 + acc1) / 2, 1e-12);
  EXPECT_NEAR(summary[0].std, std::abs(acc0 - acc1) / std::sqrt(2.0), 1e-12);

  writeManifest(dir, "train", &f.config, f.config.seeds, {f.config.drugs}, result.outputs);
  const auto manifest = readJson(dir / "manifest.json");
  EXPECT_EQ(manifest.at("config_hash"), f.config.hash());
  EXPECT_EQ(manifest.at("inputs").at(f.config.drugs), gitBlobHashOfFile(f.config.drugs));
  EXPECT_EQ(manifest.at("outputs").at("aggregate.json"), gitBlobHashOfFile(dir / "aggregate.json"));
}

TEST(Experiment, FixedSplitAndInductiveBuckets) {
  Fixture f("none");
  f.config.seeds = {3, 4};
  f.config.split.resplit_per_seed = false;
  const auto a = makeSplit(f.config, f.dataset, 3);
  EXPECT_EQ(testBuckets(a), std::vector<std::string>{"test"});
  EXPECT_EQ(a.at("ratios")[0].get<double>(), 1.0 - 0.1 - 0.2);
  f.config.split.mode = "inductive";
  f.config.split.new_fraction = 0.3;
  const auto b = makeSplit(f.config, f.dataset, 3);
  EXPECT_EQ(testBuckets(b), (std::vector<std::string>{"s1", "s2"}));
  EXPECT_FALSE(b.at("s2").empty());
}
