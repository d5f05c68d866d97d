// SPDX-License-Identifier: Apache-2.0
#include "ddi/harness/session.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <spdlog/spdlog.h>

#include "ddi/common/error.hpp"
#include "ddi/common/hashing.hpp"
#include "ddi/common/random.hpp"
#include "ddi/nn/checkpoint.hpp"

namespace ddi::harness {
namespace {

constexpr const char* kCheckpointFormat = "ddi-checkpoint/1";

// Normalization statistics are estimated on at most this many drugs.
constexpr std::size_t kNormDrugs2d = 128;
constexpr std::size_t kNormDrugs3d = 12;

int vocabularyTokens(const RunConfig& config, const chem::MotifVocabulary& vocab) {
  const int built = static_cast<int>(vocab.size());
  if (config.vocab_size == 0) return built;
  if (config.vocab_size < built) {
    fail(ErrorCode::kConfigError, "vocab_size " + std::to_string(config.vocab_size) + " is smaller than the " +
                                      std::to_string(built) + "-token vocabulary");
  }
  return config.vocab_size;
}

}  // namespace

nlohmann::json EpochRecord::toJson() const {
  return {{"epoch", epoch},
          {"train_loss", train_loss},
          {"train_accuracy", train_accuracy},
          {"valid_macro_f1", valid_macro_f1},
          {"improved", improved}};
}

data::DdiDataset loadConfiguredDataset(const RunConfig& config) {
  if (config.drugs.empty() || config.interactions.empty()) {
    fail(ErrorCode::kConfigError, "config needs both drugs and interactions paths");
  }
  std::optional<int> events;
  if (config.num_events > 0) events = config.num_events;
  return data::loadDataset(config.drugs, config.interactions, events);
}

chem::MotifVocabulary resolveVocabulary(const RunConfig& config, const data::DdiDataset& dataset) {
  chem::MotifVocabulary vocab = config.vocab.empty() ? chem::MotifVocabulary::build(dataset.drugs)
                                                     : chem::MotifVocabulary::fromJson(readFile(config.vocab));
  vocabularyTokens(config, vocab);
  return vocab;
}

Session::Session(const RunConfig& config, const data::DdiDataset& dataset, chem::MotifVocabulary vocab,
                 std::uint64_t seed)
    : config_(config),
      dataset_(&dataset),
      vocab_(std::move(vocab)),
      seed_(seed),
      vocab_tokens_(vocabularyTokens(config, vocab_)),
      adam_(nn::AdamConfig{config.lr, 0.9, 0.999, 1e-8, config.weight_decay}),
      images_(config, dataset) {
  config_.validate();
  require(dataset.num_events > 0, ErrorCode::kDataError, "dataset has no event classes");
  model_ = std::make_unique<model::DdiModel<float>>(config_.modelConfig(vocab_tokens_, dataset.num_events),
                                                    mixSeed({seed, 0x30de1}));
}

const chem::MotifSequence& Session::sequence(const std::string& drug_id) {
  if (auto it = sequences_.find(drug_id); it != sequences_.end()) return it->second;
  const auto& drug = dataset_->drug(drug_id);
  return sequences_.emplace(drug_id, chem::encodeDrug(drug.drug_id, drug.smiles, vocab_, config_.seq_len))
      .first->second;
}

model::ModelBatch<float> Session::makeModelBatch(const std::vector<std::pair<std::string, std::string>>& pairs,
                                                 bool training, int epoch) {
  std::vector<chem::PairSequence> joined;
  joined.reserve(pairs.size());
  for (const auto& [x, y] : pairs) joined.push_back(chem::joinPair(sequence(x), sequence(y)));
  std::vector<const chem::PairSequence*> refs;
  for (const auto& p : joined) refs.push_back(&p);

  model::ModelBatch<float> batch;
  batch.pairs = model::makeBatch(refs);
  if (config_.modalityKind() == model::Modality::kNone) return batch;

  // one image per distinct drug, in order of first appearance
  std::vector<std::string> drugs;
  std::map<std::string, int> row;
  auto rowOf = [&](const std::string& id) {
    auto [it, inserted] = row.emplace(id, static_cast<int>(drugs.size()));
    if (inserted) drugs.push_back(id);
    return it->second;
  };
  for (const auto& [x, y] : pairs) {
    batch.x_index.push_back(rowOf(x));
    batch.y_index.push_back(rowOf(y));
  }
  batch.images = images_.batch(drugs, training, seed_, epoch);
  return batch;
}

Matrix<float> Session::forward(const std::vector<std::size_t>& pairs, bool training, int epoch) {
  std::vector<std::pair<std::string, std::string>> ids;
  ids.reserve(pairs.size());
  for (std::size_t i : pairs) {
    require(i < dataset_->interactions.size(), ErrorCode::kIndexOutOfRange,
            "interaction index " + std::to_string(i) + " out of range");
    const auto& it = dataset_->interactions[i];
    ids.emplace_back(it.x, it.y);
  }
  return model_->forward(makeModelBatch(ids, training, epoch), training);
}

Matrix<float> Session::forwardPair(const std::string& x, const std::string& y) {
  return model_->forward(makeModelBatch({{x, y}}, false, 0), false);
}

void Session::fitNormalization(const std::vector<std::size_t>& pairs) {
  if (!model_->hasEncoder()) return;
  std::set<std::size_t> unique;
  for (std::size_t i : pairs) {
    unique.insert(dataset_->drugIndex(dataset_->interactions[i].x));
    unique.insert(dataset_->drugIndex(dataset_->interactions[i].y));
  }
  std::vector<std::size_t> order(unique.begin(), unique.end());
  Rng rng(mixSeed({seed_, 0x4e0}));
  rng.shuffle(order.begin(), order.end());
  const std::size_t cap = config_.modalityKind() == model::Modality::k3d ? kNormDrugs3d : kNormDrugs2d;
  order.resize(std::min(order.size(), cap));
  std::sort(order.begin(), order.end());
  std::vector<std::string> ids;
  for (std::size_t i : order) ids.push_back(dataset_->drugs[i].drug_id);
  model_->encoder().fitNormalization(images_.batch(ids, false, seed_, 0));
}

TrainResult Session::train(const std::vector<std::size_t>& train, const std::vector<std::size_t>& valid,
                           const std::string& checkpoint) {
  require(!train.empty(), ErrorCode::kEmptyInput, "training split is empty");
  require(!valid.empty(), ErrorCode::kEmptyInput, "validation split is empty");
  fitNormalization(train);

  TrainResult result;
  int stale = 0;
  const auto batch_size = static_cast<std::size_t>(config_.batch_size);
  for (int epoch = 1; epoch <= config_.epoch; ++epoch) {
    std::vector<std::size_t> order = train;
    Rng rng(mixSeed({seed_, 0x5bf1e, static_cast<std::uint64_t>(epoch)}));
    rng.shuffle(order.begin(), order.end());

    double loss_sum = 0;
    std::size_t correct = 0;
    for (std::size_t start = 0, b = 0; start < order.size(); start += batch_size, ++b) {
      const std::vector<std::size_t> chunk(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + batch_size)));
      std::vector<int> labels;
      for (std::size_t i : chunk) labels.push_back(dataset_->interactions[i].event);

      const Matrix<float> logits = forward(chunk, true, epoch);
      const Matrix<float> probs = nn::softmaxRows(logits);
      const double loss = model::crossEntropy(probs, labels);
      if (!std::isfinite(loss) || !logits.allFinite()) {
        fail(ErrorCode::kNonFiniteLoss, "non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                            std::to_string(b) + " (loss " + std::to_string(loss) +
                                            ", max |logit| " + std::to_string(logits.cwiseAbs().maxCoeff()) + ")");
      }
      model_->zeroGrad();
      model_->backward(model::crossEntropyLogitGrad(probs, labels));
      adam_.step(model_->trainableParameters());

      loss_sum += loss * static_cast<double>(chunk.size());
      for (Eigen::Index r = 0; r < probs.rows(); ++r) {
        Eigen::Index arg = 0;
        probs.row(r).maxCoeff(&arg);
        if (arg == labels[static_cast<std::size_t>(r)]) ++correct;
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    rec.valid_macro_f1 = evaluate(valid).metrics.macro_f1;
    rec.improved = result.log.empty() || rec.valid_macro_f1 > result.best_valid_macro_f1;
    if (rec.improved) {
      result.best_valid_macro_f1 = rec.valid_macro_f1;
      result.best_epoch = epoch;
      stale = 0;
      if (!checkpoint.empty()) save(checkpoint, epoch, rec.valid_macro_f1);
    } else {
      ++stale;
    }
    result.log.push_back(rec);
    spdlog::info("seed {} epoch {} loss {:.6f} train_acc {:.4f} valid_macro_f1 {:.4f}{}", seed_, epoch,
                 rec.train_loss, rec.train_accuracy, rec.valid_macro_f1, rec.improved ? " *" : "");
    if (stale >= config_.patience) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

Evaluation Session::evaluate(const std::vector<std::size_t>& pairs, bool keep_representations) {
  Evaluation out;
  if (pairs.empty()) out.metrics = eval::computeMetrics({}, {});  // raises kEmptyInput
  const auto batch_size = static_cast<std::size_t>(config_.batch_size);
  std::vector<Matrix<float>> pooled;
  std::vector<int> labels;
  for (std::size_t start = 0; start < pairs.size(); start += batch_size) {
    const std::vector<std::size_t> chunk(pairs.begin() + static_cast<std::ptrdiff_t>(start),
                                         pairs.begin() + static_cast<std::ptrdiff_t>(std::min(pairs.size(), start + batch_size)));
    const Matrix<float> logits = forward(chunk, false);
    for (auto& p : model::predictions(logits)) {
      labels.push_back(p.label);
      out.predictions.push_back(std::move(p));
    }
    for (std::size_t i : chunk) out.truth.push_back(dataset_->interactions[i].event);
    if (keep_representations) pooled.push_back(model_->pooled());
  }
  out.metrics = eval::computeMetrics(labels, out.truth);
  if (keep_representations) {
    out.representations.resize(static_cast<Eigen::Index>(pairs.size()), pooled.front().cols());
    Eigen::Index row = 0;
    for (const auto& m : pooled) {
      out.representations.middleRows(row, m.rows()) = m;
      row += m.rows();
    }
  }
  return out;
}

void Session::save(const std::string& path, int epoch, double best_valid_macro_f1) {
  nn::CheckpointData data;
  nn::storeState(data, model_->allParameters(), model_->buffers(), &adam_);
  data.meta = {{"format", kCheckpointFormat},
               {"config", config_.toJson()},
               {"config_hash", config_.hash()},
               {"seed", seed_},
               {"epoch", epoch},
               {"best_valid_macro_f1", best_valid_macro_f1},
               {"adam_steps", adam_.steps()},
               {"modality", config_.modality},
               {"num_events", dataset_->num_events},
               {"vocab_tokens", vocab_tokens_},
               {"vocab_hash", vocab_.hash()},
               {"vocabulary", vocab_.toJson()}};
  writeCheckpoint(path, data);
}

std::unique_ptr<Session> Session::load(const std::string& checkpoint, const data::DdiDataset& dataset,
                                       const chem::MotifVocabulary* expected_vocab) {
  const nn::CheckpointData data = nn::readCheckpoint(checkpoint);
  const auto& meta = data.meta;
  if (meta.value("format", "") != kCheckpointFormat) fail(ErrorCode::kDataError, checkpoint + " is not a model checkpoint");
  const std::string vocab_hash = meta.at("vocab_hash").get<std::string>();
  if (expected_vocab != nullptr && expected_vocab->hash() != vocab_hash) {
    fail(ErrorCode::kVocabularyMismatch, "vocabulary hash " + expected_vocab->hash() + " does not match checkpoint " + vocab_hash);
  }
  const int events = meta.at("num_events").get<int>();
  if (dataset.num_events != events) {
    fail(ErrorCode::kDataError, "dataset has " + std::to_string(dataset.num_events) + " events, checkpoint expects " +
                                    std::to_string(events));
  }
  auto vocab = chem::MotifVocabulary::fromJson(meta.at("vocabulary").get<std::string>());
  if (vocab.hash() != vocab_hash) fail(ErrorCode::kDataError, "checkpoint vocabulary is corrupt");
  const RunConfig config = RunConfig::fromJson(meta.at("config"));
  auto session = std::make_unique<Session>(config, dataset, std::move(vocab), meta.at("seed").get<std::uint64_t>());
  if (session->vocab_tokens_ != meta.at("vocab_tokens").get<int>()) fail(ErrorCode::kDataError, "vocabulary size differs from checkpoint");
  nn::loadState(data, session->model_->allParameters(), session->model_->buffers(), &session->adam_);
  session->adam_.setSteps(meta.at("adam_steps").get<std::int64_t>());
  return session;
}

}  // namespace ddi::harness
