// SPDX-License-Identifier: Apache-2.0
#include "ddi/harness/image_store.hpp"

#include <filesystem>

#include "ddi/common/error.hpp"
#include "ddi/common/random.hpp"
#include "ddi/imaging/augment.hpp"
#include "ddi/imaging/conformer.hpp"

namespace ddi::harness {

ImageStore::ImageStore(const RunConfig& config, const data::DdiDataset& dataset)
    : config_(config), dataset_(&dataset), modality_(config.modalityKind()) {}

imaging::RenderParams2D ImageStore::renderParams() const {
  imaging::RenderParams2D p;
  p.size = config_.imaging.render_size;
  // keep the drawing inside the crop window
  p.padding = std::max(p.padding, (config_.imaging.render_size - config_.imaging.crop_size) / 2 + 8);
  if (2 * p.padding >= p.size) p.padding = p.size / 8;
  p.bond_length = p.bond_length * config_.imaging.crop_size / 224.0;
  return p;
}

imaging::ViewParams ImageStore::viewParams() const {
  imaging::ViewParams p;
  p.frames = config_.imaging.frames;
  p.output_size = config_.imaging.view_size;
  p.raw_width = config_.imaging.raw_width;
  p.raw_height = config_.imaging.raw_height;
  return p;
}

imaging::AugmentParams ImageStore::augmentParams() const {
  imaging::AugmentParams p;
  p.crop_size = config_.imaging.crop_size;
  return p;
}

const imaging::Image8& ImageStore::base2d(const std::string& drug_id) {
  if (auto it = base_.find(drug_id); it != base_.end()) return it->second;
  imaging::Image8 image;
  const auto cached = std::filesystem::path(config_.images) / "2d" / (drug_id + ".png");
  if (!config_.images.empty() && std::filesystem::exists(cached)) {
    image = imaging::readPng(cached.string());
    if (image.height != config_.imaging.render_size || image.width != config_.imaging.render_size) {
      fail(ErrorCode::kDataError, cached.string() + " does not match imaging.render_size");
    }
  } else {
    image = imaging::render2d(dataset_->drug(drug_id).smiles, renderParams());
  }
  return base_.emplace(drug_id, std::move(image)).first->second;
}

const Tensor<float>& ImageStore::views3d(const std::string& drug_id) {
  if (auto it = views_.find(drug_id); it != views_.end()) return it->second;
  Tensor<float> views;
  const auto cached = std::filesystem::path(config_.images) / "3d" / (drug_id + ".npy");
  const auto p = viewParams();
  const Tensor<float>::Shape expected{static_cast<std::size_t>(p.frames), 3, static_cast<std::size_t>(p.output_size),
                                      static_cast<std::size_t>(p.output_size)};
  if (!config_.images.empty() && std::filesystem::exists(cached)) {
    views = imaging::readNpy(cached.string());
    if (views.shape() != expected) fail(ErrorCode::kDataError, cached.string() + " has shape " + shapeString(views.shape()));
  } else {
    views = imaging::renderViews(imaging::generateConformer(dataset_->drug(drug_id).smiles), p);
  }
  return views_.emplace(drug_id, std::move(views)).first->second;
}

Tensor<float> ImageStore::batch(const std::vector<std::string>& drug_ids, bool training, std::uint64_t seed, int epoch) {
  require(modality_ != model::Modality::kNone, ErrorCode::kConfigError, "modality none has no images");
  if (drug_ids.empty()) return {};
  if (modality_ == model::Modality::k3d) {
    const auto& first = views3d(drug_ids.front());
    Tensor<float>::Shape shape = first.shape();
    shape.insert(shape.begin(), drug_ids.size());
    Tensor<float> out(shape);
    for (std::size_t i = 0; i < drug_ids.size(); ++i) {
      const auto& v = views3d(drug_ids[i]);
      std::copy(v.data(), v.data() + v.size(), out.data() + i * first.size());
    }
    return out;
  }
  const auto aug = augmentParams();
  const auto side = static_cast<std::size_t>(aug.crop_size);
  Tensor<float> out(Tensor<float>::Shape{drug_ids.size(), 3, side, side});
  for (std::size_t i = 0; i < drug_ids.size(); ++i) {
    const auto& base = base2d(drug_ids[i]);
    const imaging::Image8 image =
        training && config_.imaging.augment
            ? imaging::augment2d(base, mixSeed({seed, 0xa06, static_cast<std::uint64_t>(epoch), dataset_->drugIndex(drug_ids[i])}), aug)
            : imaging::centerCrop(base, aug.crop_size, aug.fill);
    const Tensor<float> t = imaging::toTensor(image);
    std::copy(t.data(), t.data() + t.size(), out.data() + i * t.size());
  }
  return out;
}

}  // namespace ddi::harness
