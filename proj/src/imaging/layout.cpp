// SPDX-License-Identifier: Apache-2.0
#include "ddi/imaging/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ddi/common/random.hpp"

namespace ddi::imaging {
namespace {

constexpr double kRingWeight = 20.0;
constexpr int kStarts = 12;

// Zig-zag chain of k unit bonds at 120 degrees.
double chainDistance(int k) {
  if (k <= 1) return k;
  const double along = 0.5 * std::sqrt(3.0) * k;
  return k % 2 == 0 ? along : std::sqrt(along * along + 0.25);
}

// Chord between ring atoms k steps apart on a regular n-gon with unit sides.
double ringDistance(int k, int n) {
  return std::sin(std::numbers::pi * k / n) / std::sin(std::numbers::pi / n);
}

void majorize(Eigen::MatrixX2d& xy, const Eigen::MatrixXd& target, const Eigen::MatrixXd& weight) {
  const Eigen::Index n = xy.rows();
  for (int sweep = 0; sweep < 400; ++sweep) {
    // the last sweeps stiffen non-bonded pairs that crowd each other
    const bool declutter = sweep >= 300;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::RowVector2d acc = Eigen::RowVector2d::Zero();
      double wsum = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        Eigen::RowVector2d diff = xy.row(i) - xy.row(j);
        const double len = diff.norm();
        const double d = target(i, j);
        const double w = weight(i, j) * (declutter && d > 1.0 && len < 0.8 ? 50.0 : 1.0);
        if (len > 1e-12) diff *= d / len;
        acc += w * (xy.row(j) + diff);
        wsum += w;
      }
      xy.row(i) = acc / wsum;
    }
  }
}

// Weighted stress plus a penalty for atoms drawn on top of each other.
double layoutScore(const Eigen::MatrixX2d& xy, const Eigen::MatrixXd& target, const Eigen::MatrixXd& weight) {
  double score = 0.0;
  for (Eigen::Index i = 0; i < xy.rows(); ++i)
    for (Eigen::Index j = i + 1; j < xy.rows(); ++j) {
      const double len = (xy.row(i) - xy.row(j)).norm();
      score += weight(i, j) * (len - target(i, j)) * (len - target(i, j));
      if (target(i, j) > 1.0 && len < 0.7) score += 10.0 * (0.7 - len) * (0.7 - len);
    }
  return score;
}

Eigen::MatrixX2d layoutComponent(const chem::Molecule& mol, const std::vector<int>& atoms,
                                 const std::vector<std::vector<int>>& topo) {
  const auto n = static_cast<Eigen::Index>(atoms.size());
  Eigen::MatrixX2d xy = Eigen::MatrixX2d::Zero(n, 2);
  if (n == 1) return xy;
  Eigen::MatrixXd target(n, n);
  Eigen::MatrixXd weight(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      target(i, j) = chainDistance(topo[static_cast<std::size_t>(atoms[static_cast<std::size_t>(i)])]
                                       [static_cast<std::size_t>(atoms[static_cast<std::size_t>(j)])]);
  // stiff rings and bonds keep pendant rings from folding over
  weight = target.array().square().inverse();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && target(i, j) == 1.0) weight(i, j) = kRingWeight;
  std::vector<int> local(mol.atomCount(), -1);
  for (Eigen::Index i = 0; i < n; ++i) local[static_cast<std::size_t>(atoms[static_cast<std::size_t>(i)])] = static_cast<int>(i);
  // larger rings first so fused atoms keep the tighter chord of the smaller ring
  auto rings = mol.rings();
  std::sort(rings.begin(), rings.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  for (const auto& ring : rings) {
    const int m = static_cast<int>(ring.size());
    if (local[static_cast<std::size_t>(ring[0])] < 0) continue;
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) {
        const int steps = std::min(b - a, m - (b - a));
        const int i = local[static_cast<std::size_t>(ring[static_cast<std::size_t>(a)])];
        const int j = local[static_cast<std::size_t>(ring[static_cast<std::size_t>(b)])];
        target(i, j) = target(j, i) = ringDistance(steps, m);
        weight(i, j) = weight(j, i) = kRingWeight;
      }
  }
  // classical scaling for the start
  const Eigen::MatrixXd sq = target.array().square();
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd gram = -0.5 * centering * sq * centering;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  for (int d = 0; d < 2; ++d) {
    const double lambda = std::max(eig.eigenvalues()(n - 1 - d), 0.0);
    xy.col(d) = eig.eigenvectors().col(n - 1 - d) * std::sqrt(lambda);
  }
  Eigen::MatrixX2d best;
  double best_score = std::numeric_limits<double>::infinity();
  Rng rng(0x2d1a);
  for (int attempt = 0; attempt < kStarts; ++attempt) {
    // first start is the scaled classical solution, later ones perturb it hard
    const double noise = attempt == 0 ? 0.01 : 1.0 + 0.25 * attempt;
    Eigen::MatrixX2d trial = xy;
    for (Eigen::Index i = 0; i < n; ++i)
      for (int d = 0; d < 2; ++d) trial(i, d) += noise * rng.uniform(-1.0, 1.0);
    majorize(trial, target, weight);
    const double score = layoutScore(trial, target, weight);
    if (score < best_score - 1e-9) {
      best_score = score;
      best = trial;
    }
  }
  xy = best;
  // canonical orientation: principal axis horizontal
  const Eigen::RowVector2d mean = xy.colwise().mean();
  xy.rowwise() -= mean;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> axes(xy.transpose() * xy);
  Eigen::Matrix2d rot;
  rot.col(0) = axes.eigenvectors().col(1);
  rot.col(1) = Eigen::Vector2d(-rot(1, 0), rot(0, 0));
  return xy * rot;
}

}  // namespace

Eigen::MatrixX2d depictionCoordinates(const chem::Molecule& molecule) {
  chem::Molecule mol = molecule;
  mol.perceiveRings();
  const auto topo = mol.topologicalDistances();
  Eigen::MatrixX2d out = Eigen::MatrixX2d::Zero(static_cast<Eigen::Index>(mol.atomCount()), 2);
  double cursor = 0.0;
  for (const auto& atoms : mol.components()) {
    Eigen::MatrixX2d xy = layoutComponent(mol, atoms, topo);
    const double lo = xy.col(0).minCoeff(), hi = xy.col(0).maxCoeff();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      out(atoms[i], 0) = xy(static_cast<Eigen::Index>(i), 0) - lo + cursor;
      out(atoms[i], 1) = xy(static_cast<Eigen::Index>(i), 1);
    }
    cursor += hi - lo + 1.5;
  }
  if (out.rows() > 0) out.rowwise() -= out.colwise().mean();
  return out;
}

}  // namespace ddi::imaging
