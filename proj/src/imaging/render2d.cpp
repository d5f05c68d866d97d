// SPDX-License-Identifier: Apache-2.0
#include "ddi/imaging/render2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ddi/chem/elements.hpp"
#include "ddi/chem/smiles.hpp"
#include "ddi/common/error.hpp"
#include "ddi/common/hashing.hpp"
#include "ddi/imaging/layout.hpp"

namespace ddi::imaging {

nlohmann::json RenderParams2D::toJson() const {
  nlohmann::ordered_json j;
  j["scheme"] = scheme;
  j["size"] = size;
  j["padding"] = padding;
  j["bond_length"] = bond_length;
  j["line_width"] = line_width;
  j["double_bond_gap"] = double_bond_gap;
  j["font_scale"] = font_scale;
  j["background"] = background;
  j["bond_color"] = bond_color;
  return nlohmann::json(j);
}

std::string RenderParams2D::hash() const { return sha256Hex(toJson().dump()); }

namespace {

using Vec = Eigen::Vector2d;

// Label colours tuned for a white canvas (CPK hues, darkened).
Color labelColor(int z) {
  switch (z) {
    case 7: return {0, 0, 230};
    case 8: return {220, 0, 0};
    case 9:
    case 17: return {0, 150, 0};
    case 15: return {230, 115, 0};
    case 16: return {190, 140, 0};
    case 35: return {150, 40, 40};
    case 53: return {140, 0, 140};
    default: return kBlack;
  }
}

std::string atomLabel(const chem::Molecule& mol, int i) {
  const auto& a = mol.atom(i);
  const bool show = a.element != 6 || a.charge != 0 || mol.degree(i) == 0;
  if (!show) return {};
  std::string s(chem::elementSymbol(a.element));
  if (a.hydrogens > 0 && a.element != 6) {
    s += "H";
    if (a.hydrogens > 1) s += std::to_string(a.hydrogens);
  }
  if (a.charge != 0) {
    if (std::abs(a.charge) > 1) s += std::to_string(std::abs(a.charge));
    s += a.charge > 0 ? "+" : "-";
  }
  return s;
}

class Canvas {
 public:
  Canvas(Image8& image, double width) : image_(image), half_(0.5 * width) {}

  void line(Vec p, Vec q, Color c) {
    const int x0 = static_cast<int>(std::floor(std::min(p.x(), q.x()) - half_ - 1));
    const int x1 = static_cast<int>(std::ceil(std::max(p.x(), q.x()) + half_ + 1));
    const int y0 = static_cast<int>(std::floor(std::min(p.y(), q.y()) - half_ - 1));
    const int y1 = static_cast<int>(std::ceil(std::max(p.y(), q.y()) + half_ + 1));
    const Vec d = q - p;
    const double len2 = std::max(d.squaredNorm(), 1e-12);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const Vec pix(x + 0.5, y + 0.5);
        const double t = std::clamp((pix - p).dot(d) / len2, 0.0, 1.0);
        if ((pix - (p + t * d)).norm() <= half_) image_.set(y, x, c);
      }
  }

  void circle(Vec center, double radius, Color c) {
    const int r = static_cast<int>(std::ceil(radius + half_ + 1));
    for (int y = static_cast<int>(center.y()) - r; y <= static_cast<int>(center.y()) + r; ++y)
      for (int x = static_cast<int>(center.x()) - r; x <= static_cast<int>(center.x()) + r; ++x) {
        const double d = (Vec(x + 0.5, y + 0.5) - center).norm();
        if (std::abs(d - radius) <= half_) image_.set(y, x, c);
      }
  }

 private:
  Image8& image_;
  double half_;
};

}  // namespace

Image8 render2d(const chem::Molecule& molecule, const RenderParams2D& params) {
  require(params.size > 2 * params.padding && params.padding >= 0, ErrorCode::kRenderFailure,
          "render size must exceed twice the padding");
  chem::Molecule mol = molecule;
  mol.perceiveRings();
  Image8 image(params.size, params.size, params.background);
  const auto n = static_cast<int>(mol.atomCount());
  if (n == 0) fail(ErrorCode::kRenderFailure, "empty molecule");
  const Eigen::MatrixX2d raw = depictionCoordinates(mol);
  if (!raw.allFinite()) fail(ErrorCode::kRenderFailure, "non-finite depiction coordinates");

  const int glyph_h = 7 * params.font_scale;
  const double avail = params.size - 2.0 * params.padding - 2.0 * glyph_h;
  const double extent = std::max(raw.col(0).maxCoeff() - raw.col(0).minCoeff(), raw.col(1).maxCoeff() - raw.col(1).minCoeff());
  const double scale = extent * params.bond_length > avail ? avail / extent : params.bond_length;
  const Vec mid(0.5 * (raw.col(0).maxCoeff() + raw.col(0).minCoeff()), 0.5 * (raw.col(1).maxCoeff() + raw.col(1).minCoeff()));
  std::vector<Vec> pos(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // image rows grow downwards
    pos[static_cast<std::size_t>(i)] = Vec(0.5 * params.size + scale * (raw(i, 0) - mid.x()),
                                           0.5 * params.size - scale * (raw(i, 1) - mid.y()));
  }
  std::vector<std::string> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = atomLabel(mol, i);
  const double label_clear = 0.5 * glyph_h + 1.5;

  Canvas canvas(image, params.line_width);
  const double gap = params.double_bond_gap * scale;
  for (const auto& bond : mol.bonds()) {
    Vec p = pos[static_cast<std::size_t>(bond.begin)], q = pos[static_cast<std::size_t>(bond.end)];
    const Vec dir = (q - p).normalized();
    const Vec normal(-dir.y(), dir.x());
    if (!labels[static_cast<std::size_t>(bond.begin)].empty()) p += label_clear * dir;
    if (!labels[static_cast<std::size_t>(bond.end)].empty()) q -= label_clear * dir;
    const auto bi = mol.findBond(bond.begin, bond.end);
    switch (bond.order) {
      case chem::BondOrder::kDouble: {
        if (mol.isRingBond(bi)) {
          // inner line on the side of the ring centroid
          Vec side = normal;
          for (const auto& ring : mol.rings()) {
            if (std::find(ring.begin(), ring.end(), bond.begin) == ring.end() ||
                std::find(ring.begin(), ring.end(), bond.end) == ring.end())
              continue;
            Vec c = Vec::Zero();
            for (int a : ring) c += pos[static_cast<std::size_t>(a)];
            c /= static_cast<double>(ring.size());
            if ((c - p).dot(normal) < 0) side = -normal;
            break;
          }
          canvas.line(p, q, params.bond_color);
          const Vec shrink = 0.15 * (q - p);
          canvas.line(p + shrink + gap * side, q - shrink + gap * side, params.bond_color);
        } else {
          canvas.line(p + 0.5 * gap * normal, q + 0.5 * gap * normal, params.bond_color);
          canvas.line(p - 0.5 * gap * normal, q - 0.5 * gap * normal, params.bond_color);
        }
        break;
      }
      case chem::BondOrder::kTriple:
      case chem::BondOrder::kQuadruple:
        canvas.line(p, q, params.bond_color);
        canvas.line(p + gap * normal, q + gap * normal, params.bond_color);
        canvas.line(p - gap * normal, q - gap * normal, params.bond_color);
        break;
      default:
        canvas.line(p, q, params.bond_color);
    }
  }
  // aromatic rings get an inscribed circle
  for (const auto& ring : mol.rings()) {
    bool aromatic = true;
    for (std::size_t k = 0; k < ring.size() && aromatic; ++k) {
      const int b = mol.findBond(ring[k], ring[(k + 1) % ring.size()]);
      aromatic = b >= 0 && mol.bond(b).order == chem::BondOrder::kAromatic;
    }
    if (!aromatic) continue;
    Vec c = Vec::Zero();
    for (int a : ring) c += pos[static_cast<std::size_t>(a)];
    c /= static_cast<double>(ring.size());
    const double inradius = scale / (2.0 * std::tan(std::numbers::pi / static_cast<double>(ring.size())));
    canvas.circle(c, 0.6 * inradius, params.bond_color);
  }
  for (int i = 0; i < n; ++i) {
    const auto& text = labels[static_cast<std::size_t>(i)];
    if (text.empty()) continue;
    const int w = textWidth(text, params.font_scale);
    // the element symbol is centered on the atom, suffixes trail to the right
    const int sym_w = textWidth(chem::elementSymbol(mol.atom(i).element), params.font_scale);
    const int x = static_cast<int>(std::lround(pos[static_cast<std::size_t>(i)].x() - 0.5 * sym_w));
    const int y = static_cast<int>(std::lround(pos[static_cast<std::size_t>(i)].y() - 0.5 * glyph_h));
    for (int yy = y - 1; yy <= y + glyph_h; ++yy)
      for (int xx = x - 1; xx <= x + w; ++xx) image.set(yy, xx, params.background);
    drawText(image, x, y, text, labelColor(mol.atom(i).element), params.font_scale);
  }
  return image;
}

Image8 render2d(std::string_view smiles, const RenderParams2D& params) {
  return render2d(chem::parseSmiles(smiles), params);
}

}  // namespace ddi::imaging
