// SPDX-License-Identifier: Apache-2.0
#include "ddi/harness/config.hpp"

#include <set>

#include "ddi/common/error.hpp"
#include "ddi/common/hashing.hpp"

namespace ddi::harness {

using nlohmann::json;

json RunConfig::toJson() const {
  return {
      {"num_layers", num_layers},
      {"num_heads", num_heads},
      {"node_hidden", node_hidden},
      {"num_events", num_events},
      {"lr", lr},
      {"vocab_size", vocab_size},
      {"seq_len", seq_len},
      {"weight_decay", weight_decay},
      {"epoch", epoch},
      {"max_epochs", max_epochs},
      {"batch_size", batch_size},
      {"patience", patience},
      {"modality", modality},
      {"freeze_encoder", freeze_encoder},
      {"seeds", seeds},
      {"drugs", drugs},
      {"interactions", interactions},
      {"vocab", vocab},
      {"images", images},
      {"output", output},
      {"split",
       {{"mode", split.mode},
        {"valid_fraction", split.valid_fraction},
        {"test_fraction", split.test_fraction},
        {"new_fraction", split.new_fraction},
        {"resplit_per_seed", split.resplit_per_seed}}},
      {"backbone",
       {{"in_channels", backbone.in_channels},
        {"base_width", backbone.base_width},
        {"blocks", backbone.blocks},
        {"stem_kernel", backbone.stem_kernel},
        {"stem_stride", backbone.stem_stride},
        {"stem_pool", backbone.stem_pool}}},
      {"imaging",
       {{"render_size", imaging.render_size},
        {"crop_size", imaging.crop_size},
        {"augment", imaging.augment},
        {"frames", imaging.frames},
        {"view_size", imaging.view_size},
        {"raw_width", imaging.raw_width},
        {"raw_height", imaging.raw_height}}},
  };
}

namespace {

void checkKeys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::kConfigError, where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) fail(ErrorCode::kConfigError, "unknown config key '" + where + key + "'");
  }
}

template <typename V>
void read(const json& j, const char* key, V& out, const std::string& where = "") {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<V>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfigError, "config key '" + where + key + "': " + e.what());
  }
}

std::string resolve(const std::string& path, const std::filesystem::path& base) {
  if (path.empty() || base.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (base / path).lexically_normal().string();
}

std::set<std::string> keysOf(const json& j) {
  std::set<std::string> keys;
  for (const auto& [key, value] : j.items()) keys.insert(key);
  return keys;
}

}  // namespace

RunConfig RunConfig::fromJson(const json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  const json defaults = c.toJson();
  checkKeys(j, keysOf(defaults), "");
  read(j, "num_layers", c.num_layers);
  read(j, "num_heads", c.num_heads);
  read(j, "node_hidden", c.node_hidden);
  read(j, "num_events", c.num_events);
  read(j, "lr", c.lr);
  read(j, "vocab_size", c.vocab_size);
  read(j, "seq_len", c.seq_len);
  read(j, "weight_decay", c.weight_decay);
  read(j, "epoch", c.epoch);
  read(j, "max_epochs", c.max_epochs);
  read(j, "batch_size", c.batch_size);
  read(j, "patience", c.patience);
  read(j, "modality", c.modality);
  read(j, "freeze_encoder", c.freeze_encoder);
  read(j, "seeds", c.seeds);
  read(j, "drugs", c.drugs);
  read(j, "interactions", c.interactions);
  read(j, "vocab", c.vocab);
  read(j, "images", c.images);
  read(j, "output", c.output);
  if (j.contains("split")) {
    const auto& s = j.at("split");
    checkKeys(s, keysOf(defaults.at("split")), "split.");
    read(s, "mode", c.split.mode, "split.");
    read(s, "valid_fraction", c.split.valid_fraction, "split.");
    read(s, "test_fraction", c.split.test_fraction, "split.");
    read(s, "new_fraction", c.split.new_fraction, "split.");
    read(s, "resplit_per_seed", c.split.resplit_per_seed, "split.");
  }
  if (j.contains("backbone")) {
    const auto& b = j.at("backbone");
    checkKeys(b, keysOf(defaults.at("backbone")), "backbone.");
    read(b, "in_channels", c.backbone.in_channels, "backbone.");
    read(b, "base_width", c.backbone.base_width, "backbone.");
    read(b, "blocks", c.backbone.blocks, "backbone.");
    read(b, "stem_kernel", c.backbone.stem_kernel, "backbone.");
    read(b, "stem_stride", c.backbone.stem_stride, "backbone.");
    read(b, "stem_pool", c.backbone.stem_pool, "backbone.");
  }
  if (j.contains("imaging")) {
    const auto& m = j.at("imaging");
    checkKeys(m, keysOf(defaults.at("imaging")), "imaging.");
    read(m, "render_size", c.imaging.render_size, "imaging.");
    read(m, "crop_size", c.imaging.crop_size, "imaging.");
    read(m, "augment", c.imaging.augment, "imaging.");
    read(m, "frames", c.imaging.frames, "imaging.");
    read(m, "view_size", c.imaging.view_size, "imaging.");
    read(m, "raw_width", c.imaging.raw_width, "imaging.");
    read(m, "raw_height", c.imaging.raw_height, "imaging.");
  }
  c.drugs = resolve(c.drugs, base_dir);
  c.interactions = resolve(c.interactions, base_dir);
  c.vocab = resolve(c.vocab, base_dir);
  c.images = resolve(c.images, base_dir);
  c.output = resolve(c.output, base_dir);
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(readFile(path));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kConfigError, "cannot parse config " + path.string() + ": " + e.what());
  }
  return fromJson(j, path.parent_path());
}

void RunConfig::validate() const {
  auto check = [](bool ok, const std::string& message) { require(ok, ErrorCode::kConfigError, message); };
  check(num_layers >= 1 && num_heads >= 1 && node_hidden >= 1, "layers, heads and hidden size must be positive");
  check(node_hidden % num_heads == 0, "node_hidden must be divisible by num_heads");
  check(num_events >= 0 && vocab_size >= 0, "num_events and vocab_size must be non-negative");
  check(seq_len >= 1, "seq_len must be positive");
  check(lr >= 0 && weight_decay >= 0, "lr and weight_decay must be non-negative");
  check(epoch >= 1, "epoch must be positive");
  check(epoch <= max_epochs, "epoch " + std::to_string(epoch) + " exceeds max_epochs " + std::to_string(max_epochs));
  check(batch_size >= 1 && patience >= 1, "batch_size and patience must be positive");
  check(!seeds.empty(), "at least one seed is required");
  (void)modalityKind();
  check(split.mode == "transductive" || split.mode == "inductive", "split.mode must be transductive or inductive");
  check(split.valid_fraction >= 0 && split.test_fraction > 0 && split.valid_fraction + split.test_fraction < 1,
        "split fractions must leave a training share");
  check(split.new_fraction > 0 && split.new_fraction < 1, "split.new_fraction must lie in (0, 1)");
  check(backbone.in_channels == 3, "backbone.in_channels must be 3 for RGB images");
  check(backbone.base_width >= 1 && backbone.stem_kernel >= 1 && backbone.stem_stride >= 1, "backbone sizes must be positive");
  check(imaging.crop_size >= 1 && imaging.render_size >= imaging.crop_size, "imaging.render_size must be at least crop_size");
  check(imaging.frames >= 1 && imaging.view_size >= 1 && imaging.raw_width >= 1 && imaging.raw_height >= 1,
        "imaging view sizes must be positive");
}

std::string RunConfig::hash() const { return sha256Hex(toJson().dump()); }

model::ModelConfig RunConfig::modelConfig(int vocab_tokens, int classes) const {
  model::ModelConfig m;
  m.fusion.num_layers = num_layers;
  m.fusion.num_heads = num_heads;
  m.fusion.hidden = node_hidden;
  m.fusion.per_drug_len = seq_len;
  m.fusion.vocab_size = vocab_tokens;
  m.fusion.num_classes = classes;
  m.fusion.visual_dim = backbone.embeddingDim();
  m.modality = modalityKind();
  m.backbone = backbone;
  m.freeze_encoder = freeze_encoder;
  return m;
}

}  // namespace ddi::harness
