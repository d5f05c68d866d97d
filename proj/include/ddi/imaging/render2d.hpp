// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "ddi/chem/molecule.hpp"
#include "ddi/imaging/image.hpp"

namespace ddi::imaging {

//! Every knob of the 2D depiction. Hashed into output metadata so images
//! rendered with different settings are never mixed silently.
struct RenderParams2D {
  std::string scheme = "line-v1";
  int size = 256;           // canvas side in pixels
  int padding = 24;         // drawing stays inside [padding, size - padding)
  double bond_length = 22;  // pixels, shrunk when the molecule would not fit
  double line_width = 1.6;
  double double_bond_gap = 0.18;  // fraction of bond length
  int font_scale = 1;             // multiples of the 5x7 glyph cell
  Color background = kWhite;
  Color bond_color = kBlack;

  nlohmann::json toJson() const;
  std::string hash() const;
};

Image8 render2d(const chem::Molecule& mol, const RenderParams2D& params = {});
Image8 render2d(std::string_view smiles, const RenderParams2D& params = {});

//! Draws `text` with the built-in 5x7 bitmap font, top-left at (x, y).
void drawText(Image8& image, int x, int y, std::string_view text, Color color, int scale = 1);
//! Pixel width of `text` at the given scale.
int textWidth(std::string_view text, int scale = 1);

}  // namespace ddi::imaging
