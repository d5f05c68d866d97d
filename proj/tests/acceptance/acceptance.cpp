// SPDX-License-Identifier: Apache-2.0
// Acceptance gate: one PASS/FAIL line per criterion. `--only <id>` runs a
// subset (ids 1..11, 8a, 8b, 8c). Criterion 8c needs the full-size dataset
// in $DENG_DATA_DIR (drugs.tsv, interactions.tsv); run alone without it, the
// binary exits 77 so ctest reports a skip.
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "ddi/chem/tokenizer.hpp"
#include "ddi/common/error.hpp"
#include "ddi/common/hashing.hpp"
#include "ddi/common/random.hpp"
#include "ddi/data/dataset.hpp"
#include "ddi/eval/metrics.hpp"
#include "ddi/harness/experiment.hpp"
#include "ddi/harness/explain.hpp"
#include "ddi/harness/session.hpp"
#include "ddi/imaging/augment.hpp"
#include "ddi/imaging/conformer.hpp"
#include "ddi/imaging/views3d.hpp"
#include "ddi/model/ddi_model.hpp"
#include "ddi/nn/layers.hpp"

using namespace ddi;
namespace fs = std::filesystem;
using MatD = nn::Matrix<double>;

namespace {

constexpr int kSkip = 77;

struct Outcome {
  enum Kind { kPass, kFail, kSkipped } kind = kFail;
  std::string detail;
};


Outcome failed(std::string d) { return {Outcome::kFail, std::move(d)}; }
Outcome verdict(bool ok, std::string d) { return {ok ? Outcome::kPass : Outcome::kFail, std::move(d)}; }

std::string dataPath(const std::string& name) { return std::string(DDI_TEST_DATA_DIR) + "/" + name; }

double seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Central-difference relative error over every entry of `values`.
double gradError(MatD& values, const MatD& analytic, const std::function<double()>& loss) {
  const double h = 1e-6;
  double diff = 0, na = 0, nn_ = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    double& w = values.data()[i];
    const double saved = w;
    w = saved + h;
    const double up = loss();
    w = saved - h;
    const double down = loss();
    w = saved;
    const double numeric = (up - down) / (2 * h);
    diff += std::pow(analytic.data()[i] - numeric, 2);
    na += analytic.data()[i] * analytic.data()[i];
    nn_ += numeric * numeric;
  }
  const double denom = std::sqrt(na) + std::sqrt(nn_);
  return denom < 1e-12 ? std::sqrt(diff) : std::sqrt(diff) / denom;
}

// ---------------------------------------------------------------- 1
Outcome attentionOracle() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(101);
  const int d = 4;
  model::BiasedAttention<double> attn("acc", d, 1, rng);
  for (auto* lin : {&attn.q, &attn.k, &attn.v, &attn.o}) nn::initNormal(lin->bias.value, rng, 0.5);
  MatD x(2, d);
  nn::initNormal(x, rng, 1.0);
  MatD bias(1, 2);
  bias << 0.7, -1.3;
  const MatD out = attn.forward(x, &bias, {true, true}, 2);

  // brute force: scalar loops over the definition
  auto affine = [&](const nn::Linear<double>& lin, const std::vector<double>& in) {
    std::vector<double> r(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) {
      double s = lin.bias.value(0, c);
      for (int k = 0; k < d; ++k) s += in[static_cast<std::size_t>(k)] * lin.weight.value(k, c);
      r[static_cast<std::size_t>(c)] = s;
    }
    return r;
  };
  std::vector<std::vector<double>> q, k, v;
  for (int t = 0; t < 2; ++t) {
    std::vector<double> row{x(t, 0), x(t, 1), x(t, 2), x(t, 3)};
    q.push_back(affine(attn.q, row));
    k.push_back(affine(attn.k, row));
    v.push_back(affine(attn.v, row));
  }
  double worst = 0;
  for (int i = 0; i < 2; ++i) {
    double logit[2];
    for (int j = 0; j < 2; ++j) {
      double dot = 0;
      for (int c = 0; c < d; ++c) dot += q[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] * k[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
      logit[j] = dot / std::sqrt(static_cast<double>(d)) + bias(0, j);
    }
    const double e0 = std::exp(logit[0]), e1 = std::exp(logit[1]);
    std::vector<double> ctx(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c)
      ctx[static_cast<std::size_t>(c)] = (e0 * v[0][static_cast<std::size_t>(c)] + e1 * v[1][static_cast<std::size_t>(c)]) / (e0 + e1);
    const auto expected = affine(attn.o, ctx);
    for (int c = 0; c < d; ++c) worst = std::max(worst, std::abs(out(i, c) - expected[static_cast<std::size_t>(c)]));
  }
  const double t = seconds(start);
  return verdict(worst <= 1e-10 && t < 1.0, fmt::format("max |diff| {:.3e} (tol 1e-10), {:.3f} s", worst, t));
}

// ---------------------------------------------------------------- 2
std::vector<chem::PairSequence> fixturePairs(const chem::MotifVocabulary& vocab, const data::DdiDataset& ds, int count, int len) {
  std::vector<chem::PairSequence> out;
  for (int i = 0; i < count; ++i) {
    const auto& it = ds.interactions[static_cast<std::size_t>(i)];
    out.push_back(chem::joinPair(chem::encodeDrug(it.x, ds.drug(it.x).smiles, vocab, len),
                                 chem::encodeDrug(it.y, ds.drug(it.y).smiles, vocab, len)));
  }
  return out;
}

Outcome zeroBiasReduction() {
  const auto ds = data::loadDataset(dataPath("drugs.tsv"), dataPath("interactions.tsv"));
  const auto vocab = chem::MotifVocabulary::build(ds.drugs);
  const auto seqs = fixturePairs(vocab, ds, 4, 16);
  std::vector<const chem::PairSequence*> refs;
  for (const auto& s : seqs) refs.push_back(&s);

  harness::RunConfig config;  // full-size defaults
  model::DdiModel<float> m(config.modelConfig(static_cast<int>(vocab.size()), ds.num_events), 5);
  m.fusion().projector.weight.value.setZero();
  m.fusion().projector.bias.value.setZero();
  model::ModelBatch<float> batch;
  batch.pairs = model::makeBatch(refs);
  batch.images = Tensor<float>({4, 3, 224, 224});
  Rng rng(6);
  for (auto& v : batch.images.storage()) v = static_cast<float>(rng.uniform());
  batch.x_index = {0, 1, 2, 3};
  batch.y_index = {1, 2, 3, 0};
  const auto with_images = m.forward(batch, false);
  const double visual_norm = m.lastVisual().norm();
  const auto bias_free = m.forwardVisual(batch.pairs, nullptr);
  const double diff = (with_images - bias_free).cwiseAbs().maxCoeff();
  return verdict(diff <= 1e-6 && visual_norm > 0,
                 fmt::format("max |logit diff| {:.3e} (tol 1e-6) with nonzero pair-visual input (norm {:.2f})", diff, visual_norm));
}

// ---------------------------------------------------------------- 3
Outcome gradientChecks() {
  const auto start = std::chrono::steady_clock::now();
  model::ModelConfig mc;
  mc.fusion = {2, 2, 8, 3, 7, 3, 4};  // layers, heads, hidden, L, vocab, classes, visual
  mc.modality = model::Modality::k2d;
  mc.backbone.base_width = 4;
  mc.backbone.blocks = {1, 1, 0, 0};
  model::DdiModel<double> m(mc, 31);
  static const std::vector<chem::PairSequence> pairs{
      chem::joinPair({"a", {2, 3, 0}, 2}, {"b", {4, 5, 6}, 3}), chem::joinPair({"c", {6, 0, 0}, 1}, {"d", {2, 4, 0}, 2})};
  const model::PairBatch batch = model::makeBatch({&pairs[0], &pairs[1]});
  Rng rng(32);
  MatD visual(2, 2 * m.fusion().config().visual_dim);
  nn::initNormal(visual, rng, 1.0);
  nn::initNormal(m.fusion().projector.weight.value, rng, 0.3);
  const std::vector<int> labels{2, 0};
  auto loss = [&] { return model::crossEntropy(nn::softmaxRows(m.forwardVisual(batch, &visual)), labels); };
  m.zeroGrad();
  m.backward(model::crossEntropyLogitGrad(nn::softmaxRows(m.forwardVisual(batch, &visual)), labels));

  auto worstOf = [&](nn::ParameterList<double> params) {
    double worst = 0;
    for (auto* p : params) {
      const MatD g = p->grad;
      worst = std::max(worst, gradError(p->value, g, loss));
    }
    return worst;
  };
  const double projector = worstOf({&m.fusion().projector.weight, &m.fusion().projector.bias});
  nn::ParameterList<double> ffn;
  for (int i = 0; i < m.fusion().numLayers(); ++i) m.fusion().layer(i).ffn.collect(ffn);
  const double ffn_err = worstOf(ffn);
  nn::ParameterList<double> head;
  m.head().collect(head);
  const double head_err = worstOf(head);
  const double t = seconds(start);
  const bool ok = projector < 1e-4 && ffn_err < 1e-4 && head_err < 1e-4 && t < 30;
  return verdict(ok, fmt::format("rel err: projector {:.2e}, FFN {:.2e}, head {:.2e} (tol 1e-4), {:.2f} s", projector, ffn_err,
                                 head_err, t));
}

// ---------------------------------------------------------------- 4
Outcome shapeLaws() {
  const auto ds = data::loadDataset(dataPath("drugs.tsv"), dataPath("interactions.tsv"));
  const auto vocab = chem::MotifVocabulary::build(ds.drugs);
  const harness::RunConfig config;
  const auto seqs = fixturePairs(vocab, ds, 2, config.seq_len);
  const std::size_t pair_len = seqs[0].length();

  const auto views = imaging::renderViews(imaging::generateConformer(ds.drug("aspirin").smiles));
  const bool views_ok = views.shape() == Tensor<float>::Shape{10, 3, 224, 224};

  model::DdiModel<float> m(config.modelConfig(static_cast<int>(vocab.size()), ds.num_events), 1);
  model::ModelBatch<float> batch;
  std::vector<const chem::PairSequence*> refs{&seqs[0], &seqs[1]};
  batch.pairs = model::makeBatch(refs);
  batch.images = Tensor<float>({2, 3, 224, 224}, 0.5f);
  batch.x_index = {0, 1};
  batch.y_index = {1, 0};
  m.forward(batch, false);
  const auto visual_width = m.lastVisual().cols();
  return verdict(pair_len == 32 && views_ok && visual_width == 1024,
                 fmt::format("pair sequence {} (L={}), views {}, pair-visual {}", pair_len, config.seq_len,
                             shapeString(views.shape()), visual_width));
}

// ---------------------------------------------------------------- 5
struct CountingOptimizer : imaging::ConformerOptimizer {
  std::vector<int> budgets;
  imaging::OptimizeResult minimize(const imaging::ForceField&, Eigen::VectorXd&, int max_iterations) override {
    budgets.push_back(max_iterations);
    return {false, max_iterations, 0.0};
  }
};

Outcome conformerPolicy() {
  CountingOptimizer opt;
  const auto r = imaging::generateConformer("CC(=O)Oc1ccccc1C(=O)O", {}, &opt);
  bool schedule = opt.budgets.size() == 10;
  for (std::size_t k = 0; schedule && k < opt.budgets.size(); ++k) schedule = opt.budgets[k] == 5000 * (1 << k);
  const bool planar = r.coords.has_value() && r.coords->col(2).cwiseAbs().maxCoeff() == 0.0;
  std::string budgets;
  for (int b : opt.budgets) budgets += (budgets.empty() ? "" : ",") + std::to_string(b);
  return verdict(schedule && r.fallback_2d && r.attempts == 10 && !r.converged && planar,
                 fmt::format("budgets [{}], attempts {}, 2D fallback {}", budgets, r.attempts, r.fallback_2d));
}

// ---------------------------------------------------------------- 6
Outcome augmentationStats() {
  int flips = 0, grays = 0;
  const int n = 10000;
  for (int s = 0; s < n; ++s) {
    const auto d = imaging::sampleAugment(static_cast<std::uint64_t>(s));
    flips += d.flip;
    grays += d.grayscale;
  }
  const double fr = static_cast<double>(flips) / n, gr = static_cast<double>(grays) / n;
  return verdict(fr >= 0.48 && fr <= 0.52 && gr >= 0.18 && gr <= 0.22,
                 fmt::format("flip rate {:.4f} in [0.48, 0.52], grayscale rate {:.4f} in [0.18, 0.22]", fr, gr));
}

// ---------------------------------------------------------------- 7
Outcome metricOracles() {
  // confusion matrix rows = truth, cols = prediction
  const int cm[3][3] = {{2, 1, 0}, {0, 1, 1}, {1, 0, 2}};
  std::vector<int> pred, truth;
  for (int t = 0; t < 3; ++t)
    for (int p = 0; p < 3; ++p)
      for (int k = 0; k < cm[t][p]; ++k) {
        truth.push_back(t);
        pred.push_back(p);
      }
  // by hand: precision (2/3, 1/2, 2/3), recall (2/3, 1/2, 2/3), F1 equal to both
  const auto r = eval::computeMetrics(pred, truth);
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  const bool cm_ok = near(r.accuracy, 5.0 / 8.0) && near(r.macro_precision, 11.0 / 18.0) &&
                     near(r.macro_recall, 11.0 / 18.0) && near(r.macro_f1, 11.0 / 18.0);
  const auto perfect = eval::computeMetrics(truth, truth);
  const bool perfect_ok = perfect.accuracy == 1.0 && perfect.macro_precision == 1.0 && perfect.macro_recall == 1.0 &&
                          perfect.macro_f1 == 1.0;
  const MatD uniform = MatD::Constant(8, 4, 0.25);
  const double ce = model::crossEntropy(uniform, {0, 1, 2, 3, 3, 2, 1, 0});
  const double ce_err = std::abs(ce - std::log(4.0));
  return verdict(cm_ok && perfect_ok && ce_err <= 1e-9,
                 fmt::format("3-class macro P/R/F1 = {:.6f}/{:.6f}/{:.6f} (hand 11/18), perfect all 1: {}, |CE - ln 4| = {:.1e}",
                             r.macro_precision, r.macro_recall, r.macro_f1, perfect_ok, ce_err));
}

// ---------------------------------------------------------------- 8
data::DdiDataset syntheticDataset(std::uint64_t seed, int drugs, int pairs, int classes) {
  data::DdiDataset ds;
  for (int i = 0; i < drugs; ++i) ds.drugs.push_back({"D" + std::to_string(i), "C"});
  Rng rng(seed);
  std::set<std::pair<int, int>> used;
  int k = 0;
  while (static_cast<int>(ds.interactions.size()) < pairs) {
    int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(drugs)));
    int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(drugs)));
    if (a == b || used.count({std::min(a, b), std::max(a, b)})) continue;
    used.insert({std::min(a, b), std::max(a, b)});
    const int event = k < 3 * classes ? k % classes : static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
    ds.interactions.push_back({"D" + std::to_string(a), "D" + std::to_string(b), event});
    ++k;
  }
  ds.num_events = classes;
  ds.reindex();
  return ds;
}

Outcome transductiveSplits() {
  const auto ds = syntheticDataset(8, 60, 400, 7);
  std::map<int, int> per_class;
  for (const auto& it : ds.interactions) ++per_class[it.event];
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = data::splitTransductive(ds, seed);
    std::vector<int> seen(ds.interactions.size(), 0);
    for (const auto* b : {&s.train, &s.valid, &s.test})
      for (auto i : *b) ++seen[i];
    for (int c : seen) violations += c != 1;  // disjoint and exhaustive
    std::map<int, int> test_count, valid_count, train_count;
    for (auto i : s.test) ++test_count[ds.interactions[i].event];
    for (auto i : s.valid) ++valid_count[ds.interactions[i].event];
    for (auto i : s.train) ++train_count[ds.interactions[i].event];
    for (const auto& [event, n] : per_class) {
      violations += std::abs(test_count[event] - 0.2 * n) > 1.0;
      violations += test_count[event] == 0 || valid_count[event] == 0 || train_count[event] == 0;
    }
  }
  return verdict(violations == 0, fmt::format("50 seeds x {} pairs / {} classes: {} violations of disjointness, coverage or "
                                              "stratification (+-1 sample)",
                                              ds.interactions.size(), per_class.size(), violations));
}

Outcome inductiveSplits() {
  const auto ds = syntheticDataset(9, 80, 700, 5);
  int leaks = 0, routing = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = data::splitInductive(ds, 0.2, seed);
    const std::set<std::string> fresh(s.new_drugs.begin(), s.new_drugs.end());
    std::set<std::string> s2_drugs, train_drugs;
    for (auto i : s.s2) {
      s2_drugs.insert(ds.interactions[i].x);
      s2_drugs.insert(ds.interactions[i].y);
    }
    for (const auto* b : {&s.train, &s.valid})
      for (auto i : *b) {
        train_drugs.insert(ds.interactions[i].x);
        train_drugs.insert(ds.interactions[i].y);
        routing += fresh.count(ds.interactions[i].x) + fresh.count(ds.interactions[i].y) != 0;
      }
    for (const auto& d : s2_drugs) leaks += train_drugs.count(d);
    for (auto i : s.s1) routing += fresh.count(ds.interactions[i].x) + fresh.count(ds.interactions[i].y) != 1;
    for (auto i : s.s2) routing += fresh.count(ds.interactions[i].x) + fresh.count(ds.interactions[i].y) != 2;
  }
  return verdict(leaks == 0 && routing == 0,
                 fmt::format("50 seeds: {} S2 drugs seen in training pairs, {} mis-routed pairs", leaks, routing));
}

Outcome dengCounts() {
  const char* dir = std::getenv("DENG_DATA_DIR");
  if (dir == nullptr || !fs::exists(fs::path(dir) / "interactions.tsv")) {
    return {Outcome::kSkipped, "DENG_DATA_DIR not set or missing drugs.tsv/interactions.tsv"};
  }
  const auto ds = data::loadDataset((fs::path(dir) / "drugs.tsv").string(), (fs::path(dir) / "interactions.tsv").string());
  return verdict(ds.interactions.size() == 37159 && ds.drugs.size() == 567 && ds.num_events == 65,
                 fmt::format("{} interactions, {} drugs, {} events (expected 37159 / 567 / 65)", ds.interactions.size(),
                             ds.drugs.size(), ds.num_events));
}

// ---------------------------------------------------------------- 9
Outcome overfit() {
  const auto start = std::chrono::steady_clock::now();
  data::DdiDataset ds;
  ds.drugs = data::loadDataset(dataPath("drugs.tsv"), dataPath("interactions.tsv")).drugs;
  Rng rng(909);
  std::set<std::pair<std::size_t, std::size_t>> used;
  while (ds.interactions.size() < 20) {
    const auto a = rng.below(ds.drugs.size()), b = rng.below(ds.drugs.size());
    if (a == b || !used.insert({std::min(a, b), std::max(a, b)}).second) continue;
    ds.interactions.push_back({ds.drugs[a].drug_id, ds.drugs[b].drug_id, static_cast<int>(ds.interactions.size() % 3)});
  }
  ds.num_events = 3;
  ds.reindex();

  harness::RunConfig config;
  config.modality = "none";
  // Full-size model. At lr 1e-3 (the config default) the post-norm stack
  // oscillates on this tiny set without warmup; 1e-4 memorizes it.
  config.lr = 1e-4;
  config.max_epochs = 200;
  config.epoch = 200;
  std::vector<std::size_t> all(20);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  harness::Session session(config, ds, chem::MotifVocabulary::build(ds.drugs), 0);
  const auto result = session.train(all, all, "");
  const double acc = session.evaluate(all).metrics.accuracy;
  const double t = seconds(start);
  return verdict(acc >= 0.95 && t < 120,
                 fmt::format("training accuracy {:.3f} after {} epochs at lr {:g} (final loss {:.4f}), {:.1f} s", acc,
                             result.log.size(), config.lr, result.log.back().train_loss, t));
}

// ---------------------------------------------------------------- 10
Outcome microRun() {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = fs::temp_directory_path() / "ddi_acceptance_micro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  data::DdiDataset ds = data::loadDataset(dataPath("drugs.tsv"), dataPath("interactions.tsv"));
  ds.interactions.resize(50);
  ds.reindex();

  harness::RunConfig config;
  config.modality = "2d";
  config.epoch = 5;
  const auto vocab = chem::MotifVocabulary::build(ds.drugs);
  const auto split = harness::makeSplit(config, ds, 0);
  const auto train = data::bucketFromJson(split, "train"), valid = data::bucketFromJson(split, "valid"),
             test = data::bucketFromJson(split, "test");
  harness::Session session(config, ds, vocab, 0);
  const auto result = session.train(train, valid, (dir / "best.ckpt").string());
  session.save((dir / "final.ckpt").string(), static_cast<int>(result.log.size()), result.best_valid_macro_f1);

  const auto live = session.evaluate(test);
  auto reloaded = harness::Session::load((dir / "final.ckpt").string(), ds, &vocab);
  const auto again = reloaded->evaluate(test);
  double drift = std::max({std::abs(live.metrics.accuracy - again.metrics.accuracy),
                           std::abs(live.metrics.macro_f1 - again.metrics.macro_f1),
                           std::abs(live.metrics.macro_precision - again.metrics.macro_precision),
                           std::abs(live.metrics.macro_recall - again.metrics.macro_recall)});
  for (std::size_t i = 0; i < live.predictions.size(); ++i)
    for (std::size_t c = 0; c < live.predictions[i].probs.size(); ++c)
      drift = std::max(drift, std::abs(live.predictions[i].probs[c] - again.predictions[i].probs[c]));

  auto best = harness::Session::load((dir / "best.ckpt").string(), ds, &vocab);
  const double best_gap = std::abs(best->evaluate(valid).metrics.macro_f1 - result.best_valid_macro_f1);

  const auto& pair = ds.interactions[test.front()];
  const auto e = harness::explainAttention(*reloaded, pair.x, pair.y);
  harness::writeJson(dir / "attention.json", e.toJson());
  writeFile(dir / "attention.svg", harness::attentionSvg(e));
  double row_err = 0;
  for (Eigen::Index r = 0; r < e.table.rows(); ++r) row_err = std::max(row_err, std::abs(e.table.row(r).sum() - 1.0));
  const double t = seconds(start);
  return verdict(result.log.size() == 5 && drift < 1e-6 && best_gap < 1e-6 && row_err < 1e-6,
                 fmt::format("{} epochs on {} pairs in {:.1f} s; reload drift {:.1e}; best-checkpoint valid F1 gap {:.1e}; "
                             "attention rows sum to 1 within {:.1e}",
                             result.log.size(), ds.interactions.size(), t, drift, best_gap, row_err));
}

// ---------------------------------------------------------------- 11
Outcome viewPooling() {
  Rng rng(11);
  model::ImageEncoder<double> enc(nn::BackboneConfig{}, "acc3d", rng);
  const auto rendered = imaging::renderViews(imaging::generateConformer("CC(=O)Oc1ccccc1C(=O)O"));
  const std::size_t frame = 3 * 224 * 224;
  Tensor<double> single({1, 3, 224, 224}), same({1, 10, 3, 224, 224}), views({1, 10, 3, 224, 224}),
      permuted({1, 10, 3, 224, 224});
  for (std::size_t i = 0; i < frame; ++i) single.data()[i] = rendered.data()[i];
  for (std::size_t f = 0; f < 10; ++f) {
    const std::size_t pf = (f * 7 + 3) % 10;  // a fixed permutation of 0..9
    for (std::size_t i = 0; i < frame; ++i) {
      same.data()[f * frame + i] = rendered.data()[i];
      views.data()[f * frame + i] = rendered.data()[f * frame + i];
      permuted.data()[f * frame + i] = rendered.data()[pf * frame + i];
    }
  }
  const MatD one = enc.encodeImages(single, false);
  const double same_diff = (enc.encodeViews(same, false) - one).cwiseAbs().maxCoeff();
  const double perm_diff = (enc.encodeViews(views, false) - enc.encodeViews(permuted, false)).cwiseAbs().maxCoeff();
  return verdict(same_diff <= 1e-6 && perm_diff <= 1e-6,
                 fmt::format("10 identical frames vs one frame {:.1e}, permuted frames {:.1e} (tol 1e-6)", same_diff, perm_diff));
}

struct Criterion {
  std::string id, title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string id;
      while (std::getline(ss, id, ',')) only.insert(id);
    }
  }
  const std::vector<Criterion> criteria{
      {"1", "biased attention vs brute force", attentionOracle},
      {"2", "zero-bias reduction", zeroBiasReduction},
      {"3", "gradient checks", gradientChecks},
      {"4", "shape laws", shapeLaws},
      {"5", "conformer retry policy", conformerPolicy},
      {"6", "augmentation statistics", augmentationStats},
      {"7", "metric oracles", metricOracles},
      {"8a", "transductive split invariants", transductiveSplits},
      {"8b", "inductive leakage", inductiveSplits},
      {"8c", "full-size dataset counts", dengCounts},
      {"9", "overfit smoke test", overfit},
      {"10", "end-to-end micro-run", microRun},
      {"11", "view pooling", viewPooling},
  };
  int failures = 0, skips = 0, ran = 0;
  for (const auto& c : criteria) {
    const bool lettered = std::isalpha(static_cast<unsigned char>(c.id.back())) != 0;
    if (!only.empty() && !only.count(c.id) && !(lettered && only.count(c.id.substr(0, c.id.size() - 1)))) continue;
    if (only.empty() && c.id == "8c" && std::getenv("DENG_DATA_DIR") == nullptr) {
      std::cout << "criterion 8c [" << c.title << "]: SKIP (set DENG_DATA_DIR; registered as its own test)" << std::endl;
      continue;
    }
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = failed(std::string("threw: ") + e.what());
    }
    const char* tag = o.kind == Outcome::kPass ? "PASS" : o.kind == Outcome::kSkipped ? "SKIP" : "FAIL";
    failures += o.kind == Outcome::kFail;
    skips += o.kind == Outcome::kSkipped;
    std::cout << "criterion " << c.id << " [" << c.title << "]: " << tag << " - " << o.detail << std::endl;
  }
  if (failures > 0) return 1;
  if (ran > 0 && skips == ran) return kSkip;
  return 0;
}
