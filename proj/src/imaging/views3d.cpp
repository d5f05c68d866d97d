// SPDX-License-Identifier: Apache-2.0
#include "ddi/imaging/views3d.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <regex>

#include "ddi/chem/elements.hpp"
#include "ddi/common/error.hpp"
#include "ddi/common/hashing.hpp"

namespace ddi::imaging {

nlohmann::json ViewParams::toJson() const {
  nlohmann::ordered_json j;
  j["frames"] = frames;
  j["step_degrees"] = step_degrees;
  j["axes"] = "xyz";
  j["raw_width"] = raw_width;
  j["raw_height"] = raw_height;
  j["output_size"] = output_size;
  j["ball_scale"] = ball_scale;
  j["stick_radius"] = stick_radius;
  j["background"] = background;
  return nlohmann::json(j);
}

std::string ViewParams::hash() const { return sha256Hex(toJson().dump()); }

Eigen::Matrix3d frameRotation(double degrees) {
  const double t = degrees * std::numbers::pi / 180.0;
  const Eigen::Matrix3d rx = Eigen::AngleAxisd(t, Eigen::Vector3d::UnitX()).toRotationMatrix();
  const Eigen::Matrix3d ry = Eigen::AngleAxisd(t, Eigen::Vector3d::UnitY()).toRotationMatrix();
  const Eigen::Matrix3d rz = Eigen::AngleAxisd(t, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  return rz * ry * rx;
}

namespace {

constexpr double kAmbient = 0.3;

Color shade(Color base, const Eigen::Vector3d& normal) {
  static const Eigen::Vector3d light = Eigen::Vector3d(-0.4, 0.5, 1.0).normalized();
  const double k = kAmbient + (1.0 - kAmbient) * std::max(0.0, normal.dot(light));
  Color out;
  for (int c = 0; c < 3; ++c) out[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(std::lround(std::min(255.0, base[static_cast<std::size_t>(c)] * k)));
  return out;
}

}  // namespace

Image8 BallStickRenderer::render(const Scene& scene, int width, int height) {
  require(width > 0 && height > 0, ErrorCode::kRenderFailure, "render target must be non-empty");
  Image8 image(height, width, background_);
  std::vector<double> depth(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                            -std::numeric_limits<double>::infinity());
  // pixels per angstrom; the extent fits the shorter side with a small margin
  const double scale = 0.45 * std::min(width, height) / std::max(scene.extent, 1e-6);
  const double cx = 0.5 * width, cy = 0.5 * height;
  auto plot = [&](int y, int x, double z, Color c) {
    auto& d = depth[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    if (z <= d) return;
    d = z;
    image.set(y, x, c);
  };
  auto bounds = [&](double lo_x, double hi_x, double lo_y, double hi_y, int& x0, int& x1, int& y0, int& y1) {
    x0 = std::max(0, static_cast<int>(std::floor(cx + lo_x * scale)));
    x1 = std::min(width - 1, static_cast<int>(std::ceil(cx + hi_x * scale)));
    y0 = std::max(0, static_cast<int>(std::floor(cy - hi_y * scale)));
    y1 = std::min(height - 1, static_cast<int>(std::ceil(cy - lo_y * scale)));
  };
  for (const auto& atom : scene.atoms) {
    const auto& p = atom.position;
    const double r = atom.radius;
    int x0, x1, y0, y1;
    bounds(p.x() - r, p.x() + r, p.y() - r, p.y() + r, x0, x1, y0, y1);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const double wx = (x + 0.5 - cx) / scale - p.x(), wy = (cy - y - 0.5) / scale - p.y();
        const double h2 = r * r - wx * wx - wy * wy;
        if (h2 < 0) continue;
        const double dz = std::sqrt(h2);
        plot(y, x, p.z() + dz, shade(atom.color, Eigen::Vector3d(wx, wy, dz) / r));
      }
  }
  const double rc = scene.stick_radius;
  for (const auto& bond : scene.bonds) {
    const auto& pa = scene.atoms[static_cast<std::size_t>(bond.a)];
    const auto& pb = scene.atoms[static_cast<std::size_t>(bond.b)];
    const Eigen::Vector3d axis = pb.position - pa.position;
    const double len = axis.norm();
    if (len < 1e-9) continue;
    const Eigen::Vector3d u = axis / len;
    const Eigen::Vector3d dperp = Eigen::Vector3d::UnitZ() - u.z() * u;
    const double a = dperp.squaredNorm();
    if (a < 1e-12) continue;  // looking straight down the stick; the balls cover it
    int x0, x1, y0, y1;
    bounds(std::min(pa.position.x(), pb.position.x()) - rc, std::max(pa.position.x(), pb.position.x()) + rc,
           std::min(pa.position.y(), pb.position.y()) - rc, std::max(pa.position.y(), pb.position.y()) + rc, x0, x1, y0, y1);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const Eigen::Vector3d o((x + 0.5 - cx) / scale, (cy - y - 0.5) / scale, 0.0);
        const Eigen::Vector3d w = o - pa.position;
        const Eigen::Vector3d wperp = w - w.dot(u) * u;
        const double b = 2.0 * dperp.dot(wperp), c = wperp.squaredNorm() - rc * rc;
        const double disc = b * b - 4 * a * c;
        if (disc < 0) continue;
        const double t = (-b + std::sqrt(disc)) / (2 * a);  // nearest surface to the viewer
        const Eigen::Vector3d hit = o + t * Eigen::Vector3d::UnitZ();
        const double s = (hit - pa.position).dot(u);
        if (s < 0 || s > len) continue;
        const Eigen::Vector3d normal = (hit - pa.position - s * u) / rc;
        plot(y, x, hit.z(), shade(s < 0.5 * len ? pa.color : pb.color, normal));
      }
  }
  return image;
}

Scene buildScene(const ConformerResult& conformer, const ViewParams& params) {
  if (!conformer.coords) fail(ErrorCode::kRenderFailure, "conformer has no coordinates");
  const auto& xyz = *conformer.coords;
  if (!xyz.allFinite()) fail(ErrorCode::kRenderFailure, "conformer coordinates are not finite");
  Scene scene;
  scene.stick_radius = params.stick_radius;
  const Eigen::RowVector3d center = xyz.rows() ? Eigen::RowVector3d(xyz.colwise().mean()) : Eigen::RowVector3d::Zero();
  double extent = 0.0;
  for (Eigen::Index i = 0; i < xyz.rows(); ++i) {
    const int z = conformer.elements.at(static_cast<std::size_t>(i));
    const auto rgb = chem::elementColor(z);
    SceneAtom atom{(xyz.row(i) - center).transpose(), params.ball_scale * chem::vdwRadius(z), {rgb.r, rgb.g, rgb.b}};
    extent = std::max(extent, atom.position.norm() + atom.radius);
    scene.atoms.push_back(atom);
  }
  for (const auto& [a, b] : conformer.bonds) scene.bonds.push_back({a, b});
  // rotation-invariant, so the zoom is identical in every frame
  scene.extent = std::max(extent, 1.0);
  return scene;
}

Tensor<float> renderViews(const ConformerResult& conformer, const ViewParams& params, ViewRenderer* renderer) {
  require(params.frames > 0 && params.output_size > 0, ErrorCode::kConfigError, "view stack needs frames and a size");
  BallStickRenderer fallback(params.background);
  ViewRenderer& r = renderer ? *renderer : fallback;
  const Scene base = buildScene(conformer, params);
  const auto s = static_cast<std::size_t>(params.output_size);
  Tensor<float> out({static_cast<std::size_t>(params.frames), 3, s, s});
  for (int f = 0; f < params.frames; ++f) {
    Scene posed = base;
    const Eigen::Matrix3d rot = frameRotation(f * params.step_degrees);
    for (auto& atom : posed.atoms) atom.position = rot * atom.position;
    const Image8 raw = r.render(posed, params.raw_width, params.raw_height);
    if (raw.width != params.raw_width || raw.height != params.raw_height) {
      fail(ErrorCode::kRenderFailure, "renderer returned an image of the wrong size");
    }
    const Tensor<float> frame = toTensor(resizeBilinear(letterbox(raw, params.background), params.output_size, params.output_size));
    std::copy(frame.data(), frame.data() + frame.size(), out.data() + static_cast<std::size_t>(f) * frame.size());
  }
  return out;
}

void writeNpy(const std::string& path, const Tensor<float>& tensor) {
  static_assert(std::endian::native == std::endian::little);
  std::string shape = "(";
  for (auto d : tensor.shape()) shape += std::to_string(d) + ",";
  if (tensor.rank() > 1) shape.pop_back();
  shape += ")";
  std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': " + shape + ", }";
  const std::size_t total = 10 + header.size() + 1;
  header.append((64 - total % 64) % 64, ' ');
  header += '\n';
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path);
  out.write("\x93NUMPY\x01\x00", 8);
  const auto len = static_cast<std::uint16_t>(header.size());
  out.put(static_cast<char>(len & 0xff));
  out.put(static_cast<char>(len >> 8));
  out << header;
  out.write(reinterpret_cast<const char*>(tensor.data()), static_cast<std::streamsize>(tensor.size() * sizeof(float)));
  if (!out) fail(ErrorCode::kIoError, "short write to " + path);
}

Tensor<float> readNpy(const std::string& path) {
  const std::string bytes = readFile(path);
  if (bytes.size() < 10 || bytes.compare(0, 6, "\x93NUMPY") != 0) fail(ErrorCode::kDataError, path + " is not a .npy file");
  const auto len = static_cast<std::size_t>(static_cast<unsigned char>(bytes[8])) |
                   (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
  const std::string header = bytes.substr(10, len);
  if (header.find("'<f4'") == std::string::npos || header.find("'fortran_order': False") == std::string::npos) {
    fail(ErrorCode::kDataError, path + ": only C-order little-endian float32 arrays are supported");
  }
  std::smatch m;
  if (!std::regex_search(header, m, std::regex("'shape': \\(([0-9, ]*)\\)"))) fail(ErrorCode::kDataError, path + ": no shape");
  Tensor<float>::Shape shape;
  const std::string dims = m[1];
  const std::regex number("[0-9]+");
  for (std::sregex_iterator it(dims.begin(), dims.end(), number), end; it != end; ++it)
    shape.push_back(std::stoul(it->str()));
  const std::size_t count = Tensor<float>::count(shape);
  if (bytes.size() != 10 + len + count * sizeof(float)) fail(ErrorCode::kDataError, path + ": payload size mismatch");
  std::vector<float> data(count);
  std::memcpy(data.data(), bytes.data() + 10 + len, count * sizeof(float));
  return Tensor<float>(shape, std::move(data));
}

}  // namespace ddi::imaging
