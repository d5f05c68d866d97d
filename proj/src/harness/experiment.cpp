// SPDX-License-Identifier: Apache-2.0
#include "ddi/harness/experiment.hpp"

#include <fstream>

#include <spdlog/spdlog.h>

#include "ddi/common/error.hpp"
#include "ddi/common/hashing.hpp"

namespace ddi::harness {

namespace fs = std::filesystem;
using nlohmann::json;

json makeSplit(const RunConfig& config, const data::DdiDataset& dataset, std::uint64_t seed) {
  if (config.split.mode == "inductive") {
    json j = data::splitToJson(data::splitInductive(dataset, config.split.new_fraction, seed, config.split.valid_fraction));
    j["new_fraction"] = config.split.new_fraction;
    j["valid_fraction"] = config.split.valid_fraction;
    return j;
  }
  json j = data::splitToJson(
      data::splitTransductive(dataset, seed, config.split.valid_fraction, config.split.test_fraction));
  j["ratios"] = {1.0 - config.split.valid_fraction - config.split.test_fraction, config.split.valid_fraction,
                 config.split.test_fraction};
  return j;
}

std::vector<std::string> testBuckets(const json& split) {
  if (split.value("mode", "") == "inductive") return {"s1", "s2"};
  return {"test"};
}

void writeJson(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  writeFile(path, j.dump(2) + "\n");
}

json readJson(const fs::path& path) {
  try {
    return json::parse(readFile(path));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

void writeManifest(const fs::path& out, const std::string& command, const RunConfig* config,
                   const std::vector<std::uint64_t>& seeds, const std::vector<std::string>& inputs,
                   const std::vector<std::string>& outputs, const json& extra) {
  json in = json::object();
  for (const auto& p : inputs)
    if (!p.empty()) in[p] = gitBlobHashOfFile(p);
  json produced = json::object();
  for (const auto& p : outputs) produced[p] = gitBlobHashOfFile(out / p);
  json m = {{"command", command}, {"seeds", seeds}, {"inputs", in}, {"outputs", produced}};
  if (config != nullptr) {
    m["config_hash"] = config->hash();
    m["config"] = config->toJson();
  }
  for (const auto& [k, v] : extra.items()) m[k] = v;
  writeJson(out / "manifest.json", m);
}

json summaryToJson(const std::vector<eval::MetricSummary>& summary) {
  json j = json::object();
  for (const auto& s : summary) j[s.name] = {{"mean", s.mean}, {"std", s.std}};
  return j;
}

ExperimentResult runExperiment(const RunConfig& config, const data::DdiDataset& dataset,
                               const chem::MotifVocabulary& vocab, const fs::path& out) {
  ExperimentResult result;
  std::map<std::string, std::vector<eval::MetricsReport>> reports;
  for (std::uint64_t seed : config.seeds) {
    const std::uint64_t split_seed = config.split.resplit_per_seed ? seed : config.seeds.front();
    const json split = makeSplit(config, dataset, split_seed);
    const std::string dir = "seed_" + std::to_string(seed);
    fs::create_directories(out / dir);
    writeJson(out / dir / "split.json", split);
    result.outputs.push_back(dir + "/split.json");

    SeedRun run;
    run.seed = seed;
    run.checkpoint = (out / dir / "best.ckpt").string();
    spdlog::info("seed {}: {} split, {} train / {} valid pairs", seed, split.at("mode").get<std::string>(),
                 split.at("train").size(), split.at("valid").size());
    {
      Session session(config, dataset, vocab, seed);
      run.training = session.train(data::bucketFromJson(split, "train"), data::bucketFromJson(split, "valid"), run.checkpoint);
    }
    json log = json::array();
    for (const auto& rec : run.training.log) log.push_back(rec.toJson());
    writeJson(out / dir / "train_log.json", {{"seed", seed},
                                             {"best_epoch", run.training.best_epoch},
                                             {"best_valid_macro_f1", run.training.best_valid_macro_f1},
                                             {"stopped_early", run.training.stopped_early},
                                             {"epochs", log}});
    result.outputs.push_back(dir + "/train_log.json");
    result.outputs.push_back(dir + "/best.ckpt");

    auto best = Session::load(run.checkpoint, dataset, &vocab);
    json metrics = json::object();
    for (const auto& bucket : testBuckets(split)) {
      const auto report = best->evaluate(data::bucketFromJson(split, bucket)).metrics;
      run.metrics[bucket] = report;
      reports[bucket].push_back(report);
      metrics[bucket] = report.toJson();
      spdlog::info("seed {} {}: accuracy {:.4f} macro_f1 {:.4f}", seed, bucket, report.accuracy, report.macro_f1);
    }
    writeJson(out / dir / "metrics.json", metrics);
    result.outputs.push_back(dir + "/metrics.json");
    result.runs.push_back(std::move(run));
  }
  json agg = json::object();
  for (const auto& [bucket, list] : reports) {
    result.summary[bucket] = eval::aggregateRuns(list);
    agg[bucket] = summaryToJson(result.summary[bucket]);
  }
  writeJson(out / "aggregate.json", {{"runs", config.seeds.size()}, {"buckets", agg}});
  result.outputs.push_back("aggregate.json");
  return result;
}

}  // namespace ddi::harness
