// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "ddi/chem/tokenizer.hpp"
#include "ddi/data/dataset.hpp"
#include "ddi/eval/metrics.hpp"
#include "ddi/harness/config.hpp"
#include "ddi/harness/session.hpp"

namespace ddi::harness {

//! Split manifest for one seed, in the configured mode and fractions.
nlohmann::json makeSplit(const RunConfig& config, const data::DdiDataset& dataset, std::uint64_t seed);

//! Buckets scored after training: "test" or "s1" and "s2".
std::vector<std::string> testBuckets(const nlohmann::json& split);

//! Writes <out>/manifest.json: command, config hash, seeds, and git blob
//! hashes of every input and output file (paths relative to <out> for outputs).
void writeManifest(const std::filesystem::path& out, const std::string& command, const RunConfig* config,
                   const std::vector<std::uint64_t>& seeds, const std::vector<std::string>& inputs,
                   const std::vector<std::string>& outputs, const nlohmann::json& extra = nlohmann::json::object());

void writeJson(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json readJson(const std::filesystem::path& path);

struct SeedRun {
  std::uint64_t seed = 0;
  TrainResult training;
  std::string checkpoint;
  std::map<std::string, eval::MetricsReport> metrics;  // per test bucket, from the best checkpoint
};

struct ExperimentResult {
  std::vector<SeedRun> runs;
  std::map<std::string, std::vector<eval::MetricSummary>> summary;  // per bucket
  std::vector<std::string> outputs;  // files written, relative to the output directory
};

//! Per seed: split (re-drawn per seed unless disabled), train, reload the
//! best checkpoint and score the test buckets; then mean/std over seeds.
//! Files go to <out>/seed_<s>/ plus <out>/aggregate.json.
ExperimentResult runExperiment(const RunConfig& config, const data::DdiDataset& dataset,
                               const chem::MotifVocabulary& vocab, const std::filesystem::path& out);

nlohmann::json summaryToJson(const std::vector<eval::MetricSummary>& summary);

}  // namespace ddi::harness
