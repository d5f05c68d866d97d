// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "ddi/model/ddi_model.hpp"

namespace ddi::harness {

//! Every knob of a run. Read from a JSON file whose keys mirror the field
//! names; unknown keys are rejected so typos fail loudly. Relative paths are
//! resolved against the config file's directory.
struct RunConfig {
  // model and optimisation
  int num_layers = 6;    // T
  int num_heads = 8;     // K
  int node_hidden = 512;
  int num_events = 0;    // |R|; 0 infers max event + 1 from the data
  double lr = 1e-3;
  int vocab_size = 0;    // 0 accepts whatever the built vocabulary holds
  int seq_len = 16;      // L, motifs per drug
  double weight_decay = 1e-6;
  int epoch = 100;
  int max_epochs = 100;  // ceiling that `epoch` may not exceed
  int batch_size = 128;
  int patience = 20;     // epochs without validation Macro-F1 gain before stopping
  std::string modality = "2d";
  bool freeze_encoder = false;
  std::vector<std::uint64_t> seeds{0};

  // data
  std::string drugs;
  std::string interactions;
  std::string vocab;   // optional prebuilt vocabulary JSON
  std::string images;  // optional cache written by render-2d / render-3d
  std::string output;

  struct Split {
    std::string mode = "transductive";
    double valid_fraction = 0.1;
    double test_fraction = 0.2;
    double new_fraction = 0.1;
    bool resplit_per_seed = true;  // false keeps the split of seeds[0] for every run
  } split;

  nn::BackboneConfig backbone;

  struct Imaging {
    int render_size = 256;
    int crop_size = 224;
    bool augment = true;
    int frames = 10;
    int view_size = 224;
    int raw_width = 640;
    int raw_height = 480;
  } imaging;

  nlohmann::json toJson() const;
  //! Throws kConfigError on unknown keys, wrong types or broken invariants.
  static RunConfig fromJson(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);
  void validate() const;
  //! SHA-256 of the canonical JSON form.
  std::string hash() const;

  model::Modality modalityKind() const { return model::parseModality(modality); }
  model::ModelConfig modelConfig(int vocab_tokens, int classes) const;
};

}  // namespace ddi::harness
