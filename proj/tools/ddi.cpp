// SPDX-License-Identifier: Apache-2.0
// Command-line front end. Every subcommand reads a JSON run config, writes
// into --out (default: the config's output directory) and leaves a
// manifest.json there. Failures print {"code", "message"} on stderr.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "ddi/common/error.hpp"
#include "ddi/common/hashing.hpp"
#include "ddi/harness/experiment.hpp"
#include "ddi/harness/explain.hpp"
#include "ddi/harness/tsne.hpp"
#include "ddi/imaging/conformer.hpp"
#include "ddi/imaging/render2d.hpp"
#include "ddi/imaging/views3d.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ddi;
using namespace ddi::harness;

namespace {

struct Common {
  std::string config_path;
  std::string out;
  std::string log_level = "info";
};

RunConfig loadConfig(const Common& c) { return RunConfig::load(c.config_path); }

fs::path outputDir(const Common& c, const RunConfig& config) {
  const std::string dir = c.out.empty() ? config.output : c.out;
  require(!dir.empty(), ErrorCode::kConfigError, "no output directory: pass --out or set 'output' in the config");
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> datasetInputs(const Common& c, const RunConfig& config) {
  return {c.config_path, config.drugs, config.interactions, config.vocab};
}

std::vector<std::string> selectDrugs(const data::DdiDataset& ds, const std::vector<std::string>& only) {
  std::vector<std::string> ids;
  if (only.empty()) {
    for (const auto& d : ds.drugs) ids.push_back(d.drug_id);
  } else {
    for (const auto& id : only) ids.push_back(ds.drug(id).drug_id);  // validates the id
  }
  return ids;
}

int buildVocab(const Common& c) {
  const RunConfig config = loadConfig(c);
  const fs::path out = outputDir(c, config);
  const auto ds = loadConfiguredDataset(config);
  const auto vocab = chem::MotifVocabulary::build(ds.drugs);
  writeFile(out / "vocab.json", vocab.toJson());
  int truncated = 0, max_len = 0;
  for (const auto& d : ds.drugs) {
    const auto seq = chem::encodeDrug(d.drug_id, d.smiles, vocab, config.seq_len);
    truncated += seq.raw_length > config.seq_len;
    max_len = std::max(max_len, seq.raw_length);
  }
  const json stats = {{"tokens", vocab.size()},
                      {"motifs", vocab.size() - 2},
                      {"drugs", ds.drugs.size()},
                      {"seq_len", config.seq_len},
                      {"drugs_truncated", truncated},
                      {"max_motifs_per_drug", max_len},
                      {"vocab_hash", vocab.hash()}};
  writeJson(out / "vocab_stats.json", stats);
  writeManifest(out, "build-vocab", &config, config.seeds, datasetInputs(c, config), {"vocab.json", "vocab_stats.json"});
  std::cout << stats.dump(2) << "\n";
  return 0;
}

int render2dCommand(const Common& c, const std::vector<std::string>& only) {
  const RunConfig config = loadConfig(c);
  const fs::path out = outputDir(c, config);
  const auto ds = loadConfiguredDataset(config);
  ImageStore store(config, ds);
  const auto params = store.renderParams();
  fs::create_directories(out / "2d");
  std::vector<std::string> outputs;
  json failures = json::object();
  for (const auto& id : selectDrugs(ds, only)) {
    try {
      imaging::writePng((out / "2d" / (id + ".png")).string(), imaging::render2d(ds.drug(id).smiles, params));
      outputs.push_back("2d/" + id + ".png");
    } catch (const Error& e) {
      failures[id] = {{"code", e.codeName()}, {"message", e.what()}};
      spdlog::warn("{}: {}", id, e.what());
    }
  }
  writeJson(out / "2d" / "params.json", {{"params", params.toJson()}, {"hash", params.hash()}});
  outputs.push_back("2d/params.json");
  writeManifest(out, "render-2d", &config, config.seeds, datasetInputs(c, config), outputs,
                {{"render_params_hash", params.hash()}, {"failures", failures}});
  spdlog::info("rendered {} drugs, {} failures", outputs.size() - 1, failures.size());
  return failures.empty() ? 0 : 3;
}

int render3dCommand(const Common& c, const std::vector<std::string>& only) {
  const RunConfig config = loadConfig(c);
  const fs::path out = outputDir(c, config);
  const auto ds = loadConfiguredDataset(config);
  ImageStore store(config, ds);
  const auto params = store.viewParams();
  fs::create_directories(out / "3d");
  std::vector<std::string> outputs;
  json conformers = json::object(), failures = json::object();
  for (const auto& id : selectDrugs(ds, only)) {
    try {
      const auto conf = imaging::generateConformer(ds.drug(id).smiles);
      imaging::writeNpy((out / "3d" / (id + ".npy")).string(), imaging::renderViews(conf, params));
      outputs.push_back("3d/" + id + ".npy");
      conformers[id] = {{"attempts", conf.attempts}, {"converged", conf.converged}, {"fallback_2d", conf.fallback_2d}};
    } catch (const Error& e) {
      failures[id] = {{"code", e.codeName()}, {"message", e.what()}};
      spdlog::warn("{}: {}", id, e.what());
    }
  }
  writeJson(out / "3d" / "params.json", {{"params", params.toJson()}, {"hash", params.hash()}, {"conformers", conformers}});
  outputs.push_back("3d/params.json");
  writeManifest(out, "render-3d", &config, config.seeds, datasetInputs(c, config), outputs,
                {{"view_params_hash", params.hash()}, {"failures", failures}});
  spdlog::info("rendered {} drugs, {} failures", outputs.size() - 1, failures.size());
  return failures.empty() ? 0 : 3;
}

int splitCommand(const Common& c) {
  const RunConfig config = loadConfig(c);
  const fs::path out = outputDir(c, config);
  const auto ds = loadConfiguredDataset(config);
  std::vector<std::string> outputs;
  json sizes = json::object();
  for (std::uint64_t seed : config.seeds) {
    const std::uint64_t split_seed = config.split.resplit_per_seed ? seed : config.seeds.front();
    const json split = makeSplit(config, ds, split_seed);
    const std::string name = "split_seed_" + std::to_string(seed) + ".json";
    writeJson(out / name, split);
    outputs.push_back(name);
    json s = json::object();
    for (const char* b : {"train", "valid", "test", "s1", "s2"})
      if (split.contains(b)) s[b] = split.at(b).size();
    sizes[std::to_string(seed)] = s;
  }
  writeManifest(out, "split", &config, config.seeds, datasetInputs(c, config), outputs,
                {{"bucket_sizes", sizes},
                 {"duplicates_removed", ds.duplicates_removed},
                 {"conflicting_duplicates", ds.conflicting_duplicates}});
  std::cout << sizes.dump(2) << "\n";
  return 0;
}

int trainCommand(const Common& c) {
  const RunConfig config = loadConfig(c);
  const fs::path out = outputDir(c, config);
  const auto ds = loadConfiguredDataset(config);
  const auto vocab = resolveVocabulary(config, ds);
  writeFile(out / "vocab.json", vocab.toJson());
  auto result = runExperiment(config, ds, vocab, out);
  result.outputs.push_back("vocab.json");
  json summary = json::object();
  for (const auto& [bucket, s] : result.summary) summary[bucket] = summaryToJson(s);
  writeManifest(out, "train", &config, config.seeds, datasetInputs(c, config), result.outputs,
                {{"vocab_hash", vocab.hash()}, {"summary", summary}});
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int evalCommand(const Common& c, const std::string& checkpoint, const std::string& split_path,
                std::vector<std::string> buckets, bool with_predictions) {
  const RunConfig config = loadConfig(c);
  const fs::path out = outputDir(c, config);
  const auto ds = loadConfiguredDataset(config);
  const chem::MotifVocabulary* expected = nullptr;
  chem::MotifVocabulary vocab;
  if (!config.vocab.empty()) {
    vocab = chem::MotifVocabulary::fromJson(readFile(config.vocab));
    expected = &vocab;
  }
  auto session = Session::load(checkpoint, ds, expected);
  const json split = readJson(split_path);
  if (buckets.empty()) buckets = testBuckets(split);
  json metrics = json::object();
  std::vector<std::string> outputs;
  for (const auto& b : buckets) {
    const auto idx = data::bucketFromJson(split, b);
    const auto ev = session->evaluate(idx);
    metrics[b] = ev.metrics.toJson();
    if (with_predictions) {
      json rows = json::array();
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto& it = ds.interactions[idx[i]];
        rows.push_back({{"index", idx[i]}, {"x", it.x}, {"y", it.y}, {"truth", ev.truth[i]},
                        {"predicted", ev.predictions[i].label}, {"probs", ev.predictions[i].probs}});
      }
      writeJson(out / ("predictions_" + b + ".json"), rows);
      outputs.push_back("predictions_" + b + ".json");
    }
  }
  writeJson(out / "metrics.json", metrics);
  outputs.push_back("metrics.json");
  auto inputs = datasetInputs(c, config);
  inputs.push_back(checkpoint);
  inputs.push_back(split_path);
  writeManifest(out, "eval", &config, {session->seed()}, inputs, outputs);
  std::cout << metrics.dump(2) << "\n";
  return 0;
}

int aggregateCommand(const Common& c, const std::vector<std::string>& files, const std::string& bucket) {
  require(!files.empty(), ErrorCode::kEmptyInput, "aggregate needs at least one metrics file");
  std::vector<eval::MetricsReport> reports;
  for (const auto& f : files) {
    json j = readJson(f);
    if (!bucket.empty()) {
      require(j.contains(bucket), ErrorCode::kDataError, f + " has no bucket '" + bucket + "'");
      j = j.at(bucket);
    } else if (!j.contains("accuracy") && j.size() == 1) {
      j = j.begin().value();  // single-bucket metrics.json
    }
    reports.push_back(eval::MetricsReport::fromJson(j));
  }
  const std::string dir = c.out.empty() ? "." : c.out;
  fs::create_directories(dir);
  const json summary = {{"runs", reports.size()}, {"metrics", summaryToJson(eval::aggregateRuns(reports))}};
  writeJson(fs::path(dir) / "aggregate.json", summary);
  writeManifest(dir, "aggregate", nullptr, {}, files, {"aggregate.json"}, {{"bucket", bucket}});
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int attentionCommand(const Common& c, const std::string& checkpoint, const std::string& x, const std::string& y) {
  const RunConfig config = loadConfig(c);
  const fs::path out = outputDir(c, config);
  const auto ds = loadConfiguredDataset(config);
  auto session = Session::load(checkpoint, ds);
  const auto e = explainAttention(*session, x, y);
  const std::string stem = "attention_" + x + "_" + y;
  writeJson(out / (stem + ".json"), e.toJson());
  writeFile(out / (stem + ".svg"), attentionSvg(e));
  auto inputs = datasetInputs(c, config);
  inputs.push_back(checkpoint);
  writeManifest(out, "explain-attention", &config, {session->seed()}, inputs, {stem + ".json", stem + ".svg"});
  return 0;
}

int gradcamCommand(const Common& c, const std::string& checkpoint, const std::string& x, const std::string& y,
                   const std::vector<int>& frames, int target) {
  const RunConfig config = loadConfig(c);
  const fs::path out = outputDir(c, config);
  const auto ds = loadConfiguredDataset(config);
  auto session = Session::load(checkpoint, ds);
  const auto r = explainGradCam(*session, x, y, frames, target);
  std::vector<std::string> outputs;
  json frames_json = json::array();
  for (const auto& f : r.frames) {
    const std::string name = "gradcam_" + f.drug_id + "_frame" + std::to_string(f.frame) + ".png";
    imaging::writePng((out / name).string(), f.overlay);
    outputs.push_back(name);
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < f.saliency.rows(); ++i)
      rows.emplace_back(f.saliency.row(i).data(), f.saliency.row(i).data() + f.saliency.cols());
    frames_json.push_back({{"drug", f.drug_id}, {"frame", f.frame}, {"image", name}, {"saliency", rows}});
  }
  writeJson(out / "gradcam.json", {{"x", x}, {"y", y}, {"target_class", r.target_class}, {"probabilities", r.probabilities},
                                   {"threshold", 0.5}, {"frames", frames_json}});
  outputs.push_back("gradcam.json");
  auto inputs = datasetInputs(c, config);
  inputs.push_back(checkpoint);
  writeManifest(out, "explain-gradcam", &config, {session->seed()}, inputs, outputs);
  return 0;
}

int tsneCommand(const Common& c, const std::string& checkpoint, const std::string& split_path, const std::string& bucket,
                int low, int high, const std::vector<int>& events, TsneParams params, int max_samples) {
  const RunConfig config = loadConfig(c);
  const fs::path out = outputDir(c, config);
  const auto ds = loadConfiguredDataset(config);
  auto session = Session::load(checkpoint, ds);
  const json split = readJson(split_path);
  const auto idx_all = data::bucketFromJson(split, bucket);
  std::vector<int> labels_all;
  for (std::size_t i : idx_all) labels_all.push_back(ds.interactions[i].event);
  std::vector<int> chosen = events.empty() ? selectEvents(labels_all, low, high) : events;
  const std::set<int> keep(chosen.begin(), chosen.end());
  std::vector<std::size_t> idx;
  for (std::size_t i : idx_all)
    if (keep.count(ds.interactions[i].event) && static_cast<int>(idx.size()) < max_samples) idx.push_back(i);
  if (idx.size() < 2) fail(ErrorCode::kTooFewSamples, "t-SNE needs at least 2 samples, selection has " + std::to_string(idx.size()));
  const auto ev = session->evaluate(idx, true);
  const auto coords = tsne(ev.representations.cast<double>(), params);
  json points = json::array();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    points.push_back({{"index", idx[i]}, {"event", ev.truth[i]}, {"x", coords(static_cast<Eigen::Index>(i), 0)},
                      {"y", coords(static_cast<Eigen::Index>(i), 1)}});
  }
  writeJson(out / "tsne.json", {{"events", chosen}, {"bucket", bucket}, {"perplexity", params.perplexity},
                                {"iterations", params.iterations}, {"seed", params.seed}, {"points", points}});
  writeFile(out / "tsne.svg", scatterSvg(coords, ev.truth, "t-SNE of pair representations (" + bucket + ")"));
  auto inputs = datasetInputs(c, config);
  inputs.push_back(checkpoint);
  inputs.push_back(split_path);
  writeManifest(out, "tsne", &config, {params.seed}, inputs, {"tsne.json", "tsne.svg"});
  return 0;
}

void reportError(const std::string& code, const std::string& message) {
  std::cerr << json{{"code", code}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drug-drug interaction event prediction toolkit"};
  app.require_subcommand(1);
  Common common;
  auto addCommon = [&](CLI::App* sub, bool config_required = true) {
    auto* opt = sub->add_option("--config", common.config_path, "JSON run config");
    if (config_required) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory (default: config 'output')");
    sub->add_option("--log-level", common.log_level, "trace, debug, info, warn, error or off");
  };

  std::vector<std::string> only;
  std::string checkpoint, split_path, bucket, x, y;
  std::vector<std::string> buckets, files;
  std::vector<int> frames{0}, events;
  int target = -1, low = 20, high = 5, max_samples = 2000;
  bool predictions = false;
  TsneParams tsne_params;

  auto* vocab_cmd = app.add_subcommand("build-vocab", "build the motif vocabulary from the drug table");
  addCommon(vocab_cmd);
  auto* r2d = app.add_subcommand("render-2d", "render 2D depictions to <out>/2d");
  addCommon(r2d);
  r2d->add_option("--drug", only, "restrict to these drug ids");
  auto* r3d = app.add_subcommand("render-3d", "generate conformers and view stacks to <out>/3d");
  addCommon(r3d);
  r3d->add_option("--drug", only, "restrict to these drug ids");
  auto* split_cmd = app.add_subcommand("split", "write split manifests for every seed");
  addCommon(split_cmd);
  auto* train_cmd = app.add_subcommand("train", "train one model per seed and aggregate test metrics");
  addCommon(train_cmd);
  auto* eval_cmd = app.add_subcommand("eval", "score a checkpoint on split buckets");
  addCommon(eval_cmd);
  eval_cmd->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--split", split_path, "split manifest JSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--bucket", buckets, "train, valid, test, s1 or s2 (default: the test buckets)");
  eval_cmd->add_flag("--predictions", predictions, "also write per-pair predictions");
  auto* agg_cmd = app.add_subcommand("aggregate", "mean and sample std over metrics files");
  addCommon(agg_cmd, false);
  agg_cmd->add_option("files", files, "metrics JSON files")->required()->check(CLI::ExistingFile);
  agg_cmd->add_option("--bucket", bucket, "bucket key inside each file");
  auto* att_cmd = app.add_subcommand("explain-attention", "motif attention weights for one pair");
  addCommon(att_cmd);
  att_cmd->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  att_cmd->add_option("--x", x, "first drug id")->required();
  att_cmd->add_option("--y", y, "second drug id")->required();
  auto* cam_cmd = app.add_subcommand("explain-gradcam", "Grad-CAM overlays on 3D view frames");
  addCommon(cam_cmd);
  cam_cmd->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  cam_cmd->add_option("--x", x, "first drug id")->required();
  cam_cmd->add_option("--y", y, "second drug id")->required();
  cam_cmd->add_option("--frames", frames, "frame indices")->delimiter(',');
  cam_cmd->add_option("--class", target, "target class (default: predicted)");
  auto* tsne_cmd = app.add_subcommand("tsne", "t-SNE of pooled pair representations");
  addCommon(tsne_cmd);
  tsne_cmd->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  tsne_cmd->add_option("--split", split_path)->required()->check(CLI::ExistingFile);
  tsne_cmd->add_option("--bucket", bucket, "bucket to project")->default_val("test");
  tsne_cmd->add_option("--low", low, "number of rarest events")->default_val(20);
  tsne_cmd->add_option("--high", high, "number of most frequent events")->default_val(5);
  tsne_cmd->add_option("--events", events, "explicit event ids (overrides --low/--high)")->delimiter(',');
  tsne_cmd->add_option("--perplexity", tsne_params.perplexity)->default_val(30);
  tsne_cmd->add_option("--iterations", tsne_params.iterations)->default_val(1000);
  tsne_cmd->add_option("--seed", tsne_params.seed)->default_val(0);
  tsne_cmd->add_option("--max-samples", max_samples)->default_val(2000);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    reportError("ConfigError", e.what());
    return 2;
  }

  auto logger = spdlog::stderr_color_mt("ddi");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(common.log_level));

  try {
    if (vocab_cmd->parsed()) return buildVocab(common);
    if (r2d->parsed()) return render2dCommand(common, only);
    if (r3d->parsed()) return render3dCommand(common, only);
    if (split_cmd->parsed()) return splitCommand(common);
    if (train_cmd->parsed()) return trainCommand(common);
    if (eval_cmd->parsed()) return evalCommand(common, checkpoint, split_path, buckets, predictions);
    if (agg_cmd->parsed()) return aggregateCommand(common, files, bucket);
    if (att_cmd->parsed()) return attentionCommand(common, checkpoint, x, y);
    if (cam_cmd->parsed()) return gradcamCommand(common, checkpoint, x, y, frames, target);
    if (tsne_cmd->parsed()) return tsneCommand(common, checkpoint, split_path, bucket, low, high, events, tsne_params, max_samples);
  } catch (const Error& e) {
    reportError(std::string(e.codeName()), e.what());
    return 1;
  } catch (const std::exception& e) {
    reportError("InternalError", e.what());
    return 1;
  }
  return 1;
}
