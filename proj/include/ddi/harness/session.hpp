// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "ddi/chem/tokenizer.hpp"
#include "ddi/data/dataset.hpp"
#include "ddi/eval/metrics.hpp"
#include "ddi/harness/config.hpp"
#include "ddi/harness/image_store.hpp"
#include "ddi/model/ddi_model.hpp"
#include "ddi/nn/adam.hpp"

namespace ddi::harness {

using nn::Matrix;

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0;
  double train_accuracy = 0;
  double valid_macro_f1 = 0;
  bool improved = false;

  nlohmann::json toJson() const;
};

struct TrainResult {
  std::vector<EpochRecord> log;
  int best_epoch = 0;
  double best_valid_macro_f1 = 0;
  bool stopped_early = false;
};

struct Evaluation {
  std::vector<int> truth;
  std::vector<model::Prediction> predictions;
  eval::MetricsReport metrics;
  Matrix<float> representations;  // pooled pair representations, one row per pair (if requested)
};

//! One model bound to a dataset and vocabulary: trains with Adam on
//! mini-batches, selects the best epoch by validation Macro-F1 and
//! evaluates buckets of interaction indices.
class Session {
 public:
  Session(const RunConfig& config, const data::DdiDataset& dataset, chem::MotifVocabulary vocab, std::uint64_t seed);

  //! Restores a checkpoint. When `expected_vocab` is given its hash must match
  //! the checkpoint's (kVocabularyMismatch otherwise).
  static std::unique_ptr<Session> load(const std::string& checkpoint, const data::DdiDataset& dataset,
                                       const chem::MotifVocabulary* expected_vocab = nullptr);

  //! Trains on `train`, validates on `valid` after every epoch and writes the
  //! best model to `checkpoint` (skipped when empty). Leaves the session
  //! holding the final-epoch weights.
  TrainResult train(const std::vector<std::size_t>& train, const std::vector<std::size_t>& valid,
                    const std::string& checkpoint);

  Evaluation evaluate(const std::vector<std::size_t>& pairs, bool keep_representations = false);

  void save(const std::string& path, int epoch, double best_valid_macro_f1);

  //! Forward pass over the given interactions; images use eval preprocessing.
  Matrix<float> forward(const std::vector<std::size_t>& pairs, bool training, int epoch = 0);
  //! Same for an arbitrary drug pair.
  Matrix<float> forwardPair(const std::string& x, const std::string& y);

  model::DdiModel<float>& model() { return *model_; }
  nn::Adam<float>& optimizer() { return adam_; }
  const RunConfig& config() const { return config_; }
  const chem::MotifVocabulary& vocabulary() const { return vocab_; }
  const data::DdiDataset& dataset() const { return *dataset_; }
  ImageStore& images() { return images_; }
  std::uint64_t seed() const { return seed_; }
  const chem::MotifSequence& sequence(const std::string& drug_id);

  //! Sets image normalization statistics from the drugs of these pairs.
  void fitNormalization(const std::vector<std::size_t>& pairs);

 private:
  model::ModelBatch<float> makeModelBatch(const std::vector<std::pair<std::string, std::string>>& pairs,
                                          bool training, int epoch);

  RunConfig config_;
  const data::DdiDataset* dataset_;
  chem::MotifVocabulary vocab_;
  std::uint64_t seed_;
  int vocab_tokens_;
  std::unique_ptr<model::DdiModel<float>> model_;
  nn::Adam<float> adam_;
  ImageStore images_;
  std::map<std::string, chem::MotifSequence> sequences_;
};

//! Vocabulary from the config's prebuilt file, or built from the drug table.
//! A nonzero config vocab_size smaller than the vocabulary is a kConfigError.
chem::MotifVocabulary resolveVocabulary(const RunConfig& config, const data::DdiDataset& dataset);

data::DdiDataset loadConfiguredDataset(const RunConfig& config);

}  // namespace ddi::harness
