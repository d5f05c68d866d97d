// SPDX-License-Identifier: Apache-2.0
#include "ddi/imaging/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "ddi/common/error.hpp"

namespace ddi::imaging {

Image8::Image8(int h, int w, Color fill) : height(h), width(w) {
  require(h >= 0 && w >= 0, ErrorCode::kShapeMismatch, "negative image size");
  pixels.resize(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) std::memcpy(&pixels[i], fill.data(), 3);
}

void Image8::set(int y, int x, Color c) {
  if (!inside(y, x)) return;
  std::memcpy(at(y, x), c.data(), 3);
}

double Image8::fractionEqual(Color c) const {
  if (pixels.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pixels.size(); i += 3) hits += std::memcmp(&pixels[i], c.data(), 3) == 0;
  return static_cast<double>(hits) / static_cast<double>(pixels.size() / 3);
}

void writePng(const std::string& path, const Image8& image) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.pixels.data(), 0, nullptr)) {
    fail(ErrorCode::kIoError, "cannot write " + path + ": " + png.message);
  }
}

Image8 readPng(const std::string& path) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    fail(ErrorCode::kIoError, "cannot read " + path + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  Image8 image(static_cast<int>(png.height), static_cast<int>(png.width));
  if (!png_image_finish_read(&png, nullptr, image.pixels.data(), 0, nullptr)) {
    png_image_free(&png);
    fail(ErrorCode::kIoError, "cannot decode " + path + ": " + png.message);
  }
  return image;
}

Tensor<float> toTensor(const Image8& image) {
  const auto h = static_cast<std::size_t>(image.height), w = static_cast<std::size_t>(image.width);
  Tensor<float> out({3, h, w});
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const auto* p = image.at(static_cast<int>(y), static_cast<int>(x));
      for (std::size_t c = 0; c < 3; ++c) out(c, y, x) = static_cast<float>(p[c]) / 255.0f;
    }
  return out;
}

Image8 letterbox(const Image8& image, Color fill) {
  const int side = std::max(image.height, image.width);
  Image8 out(side, side, fill);
  const int oy = (side - image.height) / 2, ox = (side - image.width) / 2;
  for (int y = 0; y < image.height; ++y)
    std::memcpy(out.at(y + oy, ox), image.at(y, 0), static_cast<std::size_t>(image.width) * 3);
  return out;
}

Image8 resizeBilinear(const Image8& image, int height, int width) {
  require(image.height > 0 && image.width > 0 && height > 0 && width > 0, ErrorCode::kShapeMismatch,
          "resize of an empty image");
  Image8 out(height, width);
  const double sy = static_cast<double>(image.height) / height, sx = static_cast<double>(image.width) / width;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, image.height - 1.0);
    const int y0 = static_cast<int>(fy), y1 = std::min(y0 + 1, image.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, image.width - 1.0);
      const int x0 = static_cast<int>(fx), x1 = std::min(x0 + 1, image.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < 3; ++c) {
        const double top = image.at(y0, x0)[c] * (1 - wx) + image.at(y0, x1)[c] * wx;
        const double bottom = image.at(y1, x0)[c] * (1 - wx) + image.at(y1, x1)[c] * wx;
        out.at(y, x)[c] = static_cast<std::uint8_t>(std::lround(top * (1 - wy) + bottom * wy));
      }
    }
  }
  return out;
}

}  // namespace ddi::imaging
