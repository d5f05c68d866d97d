// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "ddi/imaging/image.hpp"

namespace ddi::imaging {

struct AugmentParams {
  int crop_size = 224;
  double flip_probability = 0.5;
  double grayscale_probability = 0.2;
  bool rotate = true;  // uniform angle in [0, 360)
  Color fill = kWhite;  // revealed corners after rotation
};

//! Random choices for one augmentation draw; constructible directly to force a branch.
struct AugmentDecision {
  bool flip = false;
  bool grayscale = false;
  double angle_degrees = 0.0;
};

//! Three draws in a fixed order (flip, grayscale, angle) so every seed
//! consumes the stream identically whatever the outcomes.
AugmentDecision sampleAugment(std::uint64_t seed, const AugmentParams& params = {});

//! Center crop, horizontal flip, grayscale (replicated to 3 channels), then
//! counterclockwise rotation about the image center with bilinear sampling.
Image8 applyAugment(const Image8& image, const AugmentDecision& decision, const AugmentParams& params = {});

inline Image8 augment2d(const Image8& image, std::uint64_t seed, const AugmentParams& params = {}) {
  return applyAugment(image, sampleAugment(seed, params), params);
}

//! Center crop to side x side; a smaller image is padded with `fill`.
Image8 centerCrop(const Image8& image, int side, Color fill = kWhite);

}  // namespace ddi::imaging
