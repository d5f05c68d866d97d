// SPDX-License-Identifier: Apache-2.0
#include "ddi/imaging/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ddi/common/error.hpp"
#include "ddi/common/random.hpp"

namespace ddi::imaging {

AugmentDecision sampleAugment(std::uint64_t seed, const AugmentParams& params) {
  Rng rng(seed);
  AugmentDecision d;
  d.flip = rng.uniform() < params.flip_probability;
  d.grayscale = rng.uniform() < params.grayscale_probability;
  const double angle = rng.uniform(0.0, 360.0);
  d.angle_degrees = params.rotate ? angle : 0.0;
  return d;
}

Image8 centerCrop(const Image8& image, int side, Color fill) {
  require(side > 0, ErrorCode::kShapeMismatch, "crop size must be positive");
  Image8 out(side, side, fill);
  const int oy = (image.height - side) / 2, ox = (image.width - side) / 2;
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      if (image.inside(y + oy, x + ox)) std::copy_n(image.at(y + oy, x + ox), 3, out.at(y, x));
  return out;
}

namespace {

void flipHorizontal(Image8& image) {
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width / 2; ++x) std::swap_ranges(image.at(y, x), image.at(y, x) + 3, image.at(y, image.width - 1 - x));
}

void toGrayscale(Image8& image) {
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      auto* p = image.at(y, x);
      const auto g = static_cast<std::uint8_t>(std::lround(0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]));
      p[0] = p[1] = p[2] = g;
    }
}

Image8 rotate(const Image8& image, double degrees, Color fill) {
  if (degrees == 0.0) return image;
  const double rad = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  const double cx = 0.5 * image.width, cy = 0.5 * image.height;
  Image8 out(image.height, image.width, fill);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      // inverse map; rows grow downwards so counterclockwise on screen flips the sign of s
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      const double sx = c * dx - s * dy + cx - 0.5, sy = s * dx + c * dy + cy - 0.5;
      const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
      const double wx = sx - x0, wy = sy - y0;
      double acc[3] = {0, 0, 0};
      for (int k = 0; k < 4; ++k) {
        const int xx = x0 + (k & 1), yy = y0 + (k >> 1);
        const double w = ((k & 1) ? wx : 1 - wx) * ((k >> 1) ? wy : 1 - wy);
        const std::uint8_t* p = image.inside(yy, xx) ? image.at(yy, xx) : fill.data();
        for (int ch = 0; ch < 3; ++ch) acc[ch] += w * p[ch];
      }
      for (int ch = 0; ch < 3; ++ch) out.at(y, x)[ch] = static_cast<std::uint8_t>(std::clamp(std::lround(acc[ch]), 0L, 255L));
    }
  return out;
}

}  // namespace

Image8 applyAugment(const Image8& image, const AugmentDecision& decision, const AugmentParams& params) {
  require(image.height == image.width, ErrorCode::kShapeMismatch, "augmentation expects a square image");
  Image8 out = centerCrop(image, params.crop_size, params.fill);
  if (decision.flip) flipHorizontal(out);
  if (decision.grayscale) toGrayscale(out);
  return rotate(out, decision.angle_degrees, params.fill);
}

}  // namespace ddi::imaging
