// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "ddi/data/dataset.hpp"
#include "ddi/harness/config.hpp"
#include "ddi/imaging/augment.hpp"
#include "ddi/imaging/image.hpp"
#include "ddi/imaging/render2d.hpp"
#include "ddi/imaging/views3d.hpp"

namespace ddi::harness {

//! Per-drug image inputs. Base 2D renders and 3D view stacks are produced
//! once (or read from the config's image cache) and kept in memory; 2D
//! augmentation is resampled per (seed, epoch, drug).
class ImageStore {
 public:
  ImageStore(const RunConfig& config, const data::DdiDataset& dataset);

  model::Modality modality() const { return modality_; }

  //! N x C x H x W (2d) or N x V x C x H x W (3d) for the listed drugs.
  //! Training draws augmentations from mixSeed(seed, epoch, drug index).
  Tensor<float> batch(const std::vector<std::string>& drug_ids, bool training, std::uint64_t seed, int epoch);

  const imaging::Image8& base2d(const std::string& drug_id);
  const Tensor<float>& views3d(const std::string& drug_id);

  imaging::RenderParams2D renderParams() const;
  imaging::ViewParams viewParams() const;
  imaging::AugmentParams augmentParams() const;

 private:
  RunConfig config_;
  const data::DdiDataset* dataset_;
  model::Modality modality_;
  std::map<std::string, imaging::Image8> base_;
  std::map<std::string, Tensor<float>> views_;
};

}  // namespace ddi::harness
