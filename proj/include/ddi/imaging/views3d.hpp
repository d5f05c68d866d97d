// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "json.hpp"
#include "ddi/common/tensor.hpp"
#include "ddi/imaging/conformer.hpp"
#include "ddi/imaging/image.hpp"

namespace ddi::imaging {

struct SceneAtom {
  Eigen::Vector3d position;
  double radius = 0.4;
  Color color{};
};

struct SceneBond {
  int a = 0;
  int b = 0;
};

//! A posed molecule in camera space: the viewer looks down -z, x to the
//! right, y up. `extent` is the radius the camera must fit.
struct Scene {
  std::vector<SceneAtom> atoms;
  std::vector<SceneBond> bonds;
  double stick_radius = 0.15;
  double extent = 1.0;
};

//! Off-screen renderer; substitutable in tests.
class ViewRenderer {
 public:
  virtual ~ViewRenderer() = default;
  virtual Image8 render(const Scene& scene, int width, int height) = 0;
};

//! Software ball-and-stick rasterizer: orthographic camera, z-buffer,
//! ambient plus Lambert shading, bonds split half and half in atom colours.
class BallStickRenderer : public ViewRenderer {
 public:
  explicit BallStickRenderer(Color background = kBlack) : background_(background) {}
  Image8 render(const Scene& scene, int width, int height) override;

 private:
  Color background_;
};

struct ViewParams {
  int frames = 10;
  double step_degrees = 36.0;  // frame i is rotated by i * step about x, y and z
  int raw_width = 640;
  int raw_height = 480;
  int output_size = 224;
  double ball_scale = 0.25;  // sphere radius as a fraction of the vdW radius
  double stick_radius = 0.15;
  Color background = kBlack;

  nlohmann::json toJson() const;
  std::string hash() const;
};

//! Rz(t) * Ry(t) * Rx(t), counterclockwise, t in degrees.
Eigen::Matrix3d frameRotation(double degrees);

//! Centered, unrotated scene for a conformer.
Scene buildScene(const ConformerResult& conformer, const ViewParams& params);

//! frames x 3 x S x S floats in [0, 1]. Each raw render is letterboxed with the
//! background colour to a square and bilinearly resized to S x S.
Tensor<float> renderViews(const ConformerResult& conformer, const ViewParams& params = {},
                          ViewRenderer* renderer = nullptr);

//! Minimal NumPy .npy (v1.0, little-endian float32, C order) io.
void writeNpy(const std::string& path, const Tensor<float>& tensor);
Tensor<float> readNpy(const std::string& path);

}  // namespace ddi::imaging
