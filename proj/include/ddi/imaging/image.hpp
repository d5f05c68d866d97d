// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ddi/common/tensor.hpp"

namespace ddi::imaging {

using Color = std::array<std::uint8_t, 3>;

inline constexpr Color kWhite{255, 255, 255};
inline constexpr Color kBlack{0, 0, 0};

//! 8-bit RGB raster, H x W x 3, row-major.
struct Image8 {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;

  Image8() = default;
  Image8(int h, int w, Color fill = kWhite);

  std::uint8_t* at(int y, int x) { return &pixels[(static_cast<std::size_t>(y) * width + x) * 3]; }
  const std::uint8_t* at(int y, int x) const { return &pixels[(static_cast<std::size_t>(y) * width + x) * 3]; }
  void set(int y, int x, Color c);
  bool inside(int y, int x) const { return y >= 0 && x >= 0 && y < height && x < width; }

  //! Fraction of pixels exactly equal to `c`.
  double fractionEqual(Color c) const;

  bool operator==(const Image8&) const = default;
};

void writePng(const std::string& path, const Image8& image);
Image8 readPng(const std::string& path);

//! 3 x H x W floats in [0, 1].
Tensor<float> toTensor(const Image8& image);

//! Pads to a square canvas of side max(H, W) with `fill`, image centered.
Image8 letterbox(const Image8& image, Color fill);

//! Bilinear resampling with half-pixel centers and edge clamping.
Image8 resizeBilinear(const Image8& image, int height, int width);

}  // namespace ddi::imaging
