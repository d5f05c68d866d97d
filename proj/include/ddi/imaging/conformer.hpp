// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ddi/chem/molecule.hpp"

namespace ddi::imaging {

//! Simplified valence force field over heavy atoms: harmonic bond stretch,
//! cosine-harmonic angle bend, twofold torsion on double and aromatic bonds
//! (keeps them planar) and a one-sided repulsion between atoms three or more
//! bonds apart. Coordinates are packed x0 y0 z0 x1 ...
class ForceField {
 public:
  explicit ForceField(const chem::Molecule& mol);

  int dimension() const { return 3 * atoms_; }
  double energy(const Eigen::VectorXd& x) const;
  double energyAndGradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const;

  struct BondTerm { int a, b; double r0; };
  struct AngleTerm { int a, b, c; double cos0; };
  struct TorsionTerm { int a, b, c, d; };
  struct RepulsionTerm { int a, b; double rmin; };

  const std::vector<BondTerm>& bonds() const { return bonds_; }
  const std::vector<AngleTerm>& angles() const { return angles_; }

  static constexpr double kBond = 300.0;
  static constexpr double kAngle = 100.0;
  static constexpr double kTorsion = 5.0;
  static constexpr double kRepulsion = 20.0;

 private:
  int atoms_ = 0;
  std::vector<BondTerm> bonds_;
  std::vector<AngleTerm> angles_;
  std::vector<TorsionTerm> torsions_;
  std::vector<RepulsionTerm> repulsions_;
};

struct OptimizeResult {
  bool converged = false;
  int iterations = 0;
  double energy = 0.0;
};

//! Minimizer used by the conformer retry loop; tests inject stubs.
class ConformerOptimizer {
 public:
  virtual ~ConformerOptimizer() = default;
  virtual OptimizeResult minimize(const ForceField& field, Eigen::VectorXd& x, int max_iterations) = 0;
};

//! GSL vector BFGS2; converged when the gradient norm drops below the tolerance.
class BfgsOptimizer : public ConformerOptimizer {
 public:
  explicit BfgsOptimizer(double gradient_tolerance = 1e-3) : tolerance_(gradient_tolerance) {}
  OptimizeResult minimize(const ForceField& field, Eigen::VectorXd& x, int max_iterations) override;

 private:
  double tolerance_;
};

struct ConformerParams {
  std::uint64_t seed = 42;
  int base_iterations = 5000;  // budget of attempt k is base * 2^(k-1)
  int max_attempts = 10;
};

struct ConformerResult {
  std::optional<Eigen::MatrixX3d> coords;  // heavy atoms only
  std::vector<int> elements;               // atomic numbers, rows of coords
  std::vector<std::pair<int, int>> bonds;  // heavy-atom bonds by row index
  bool converged = false;
  int attempts = 0;
  bool fallback_2d = false;
  double energy = 0.0;
};

//! Drops explicit hydrogen atoms and their bonds.
chem::Molecule stripHydrogens(const chem::Molecule& mol);

//! Random distance-geometry embedding between smoothed bounds.
Eigen::MatrixX3d embedCoordinates(const chem::Molecule& mol, std::uint64_t seed);

//! Embed and minimize; attempt k gets base * 2^(k-1) iterations from a fresh
//! embedding. After max_attempts failures the planar depiction is returned.
ConformerResult generateConformer(const chem::Molecule& mol, const ConformerParams& params = {},
                                  ConformerOptimizer* optimizer = nullptr);
ConformerResult generateConformer(std::string_view smiles, const ConformerParams& params = {},
                                  ConformerOptimizer* optimizer = nullptr);

}  // namespace ddi::imaging
