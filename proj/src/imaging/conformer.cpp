// SPDX-License-Identifier: Apache-2.0
#include "ddi/imaging/conformer.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ddi/chem/elements.hpp"
#include "ddi/chem/smiles.hpp"
#include "ddi/common/error.hpp"
#include "ddi/common/random.hpp"
#include "ddi/imaging/layout.hpp"

namespace ddi::imaging {
namespace {

using Vec3 = Eigen::Vector3d;

enum class Hybrid { kSp, kSp2, kSp3 };

Hybrid hybridization(const chem::Molecule& mol, int atom) {
  int doubles = 0;
  bool triple = false, aromatic = false;
  for (const auto& nb : mol.neighbors(atom)) {
    const auto order = mol.bond(nb.bond).order;
    doubles += order == chem::BondOrder::kDouble;
    triple |= order == chem::BondOrder::kTriple;
    aromatic |= order == chem::BondOrder::kAromatic;
  }
  if (triple || (doubles >= 2 && mol.degree(atom) == 2)) return Hybrid::kSp;
  if (doubles > 0 || aromatic) return Hybrid::kSp2;
  return Hybrid::kSp3;
}

double idealAngle(const chem::Molecule& mol, int a, int b, int c) {
  for (const auto& ring : mol.rings()) {
    const int n = static_cast<int>(ring.size());
    if (n > 5) continue;
    for (int k = 0; k < n; ++k) {
      if (ring[static_cast<std::size_t>(k)] != b) continue;
      const int prev = ring[static_cast<std::size_t>((k + n - 1) % n)], next = ring[static_cast<std::size_t>((k + 1) % n)];
      if ((prev == a && next == c) || (prev == c && next == a)) return 180.0 * (n - 2) / n;
    }
  }
  switch (hybridization(mol, b)) {
    case Hybrid::kSp: return 180.0;
    case Hybrid::kSp2: return 120.0;
    default: return 109.47;
  }
}

double bondLength(const chem::Molecule& mol, const chem::Bond& bond) {
  const double sum = chem::covalentRadius(mol.atom(bond.begin).element) + chem::covalentRadius(mol.atom(bond.end).element);
  switch (bond.order) {
    case chem::BondOrder::kAromatic: return 0.92 * sum;
    case chem::BondOrder::kDouble: return 0.87 * sum;
    case chem::BondOrder::kTriple:
    case chem::BondOrder::kQuadruple: return 0.78 * sum;
    default: return sum;
  }
}

double repulsionRadius(const chem::Molecule& mol, int a, int b, int topo) {
  if (topo == 3) return 2.5;
  return 0.75 * (chem::vdwRadius(mol.atom(a).element) + chem::vdwRadius(mol.atom(b).element));
}

Vec3 at(const Eigen::VectorXd& x, int i) { return x.segment<3>(3 * i); }

}  // namespace

ForceField::ForceField(const chem::Molecule& molecule) {
  chem::Molecule mol = molecule;
  mol.perceiveRings();
  atoms_ = static_cast<int>(mol.atomCount());
  for (const auto& bond : mol.bonds()) bonds_.push_back({bond.begin, bond.end, bondLength(mol, bond)});
  for (int b = 0; b < atoms_; ++b) {
    const auto nbs = mol.neighbors(b);
    for (std::size_t i = 0; i < nbs.size(); ++i)
      for (std::size_t j = i + 1; j < nbs.size(); ++j) {
        const double theta = idealAngle(mol, nbs[i].atom, b, nbs[j].atom);
        angles_.push_back({nbs[i].atom, b, nbs[j].atom, std::cos(theta * std::numbers::pi / 180.0)});
      }
  }
  for (const auto& bond : mol.bonds()) {
    if (bond.order != chem::BondOrder::kDouble && bond.order != chem::BondOrder::kAromatic) continue;
    if (hybridization(mol, bond.begin) == Hybrid::kSp || hybridization(mol, bond.end) == Hybrid::kSp) continue;
    for (const auto& na : mol.neighbors(bond.begin)) {
      if (na.atom == bond.end) continue;
      for (const auto& nd : mol.neighbors(bond.end)) {
        if (nd.atom == bond.begin || nd.atom == na.atom) continue;
        torsions_.push_back({na.atom, bond.begin, bond.end, nd.atom});
      }
    }
  }
  const auto topo = mol.topologicalDistances();
  for (int a = 0; a < atoms_; ++a)
    for (int b = a + 1; b < atoms_; ++b) {
      const int t = topo[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      if (t >= 0 && t < 3) continue;
      repulsions_.push_back({a, b, repulsionRadius(mol, a, b, t)});
    }
}

double ForceField::energy(const Eigen::VectorXd& x) const {
  Eigen::VectorXd unused(x.size());
  return energyAndGradient(x, unused);
}

double ForceField::energyAndGradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
  grad.setZero(x.size());
  double e = 0.0;
  for (const auto& t : bonds_) {
    const Vec3 d = at(x, t.a) - at(x, t.b);
    const double r = std::max(d.norm(), 1e-9), dr = r - t.r0;
    e += kBond * dr * dr;
    const Vec3 g = 2.0 * kBond * dr / r * d;
    grad.segment<3>(3 * t.a) += g;
    grad.segment<3>(3 * t.b) -= g;
  }
  for (const auto& t : angles_) {
    const Vec3 u = at(x, t.a) - at(x, t.b), v = at(x, t.c) - at(x, t.b);
    const double lu = std::max(u.norm(), 1e-9), lv = std::max(v.norm(), 1e-9);
    const double cosv = u.dot(v) / (lu * lv), dc = cosv - t.cos0;
    e += kAngle * dc * dc;
    const Vec3 ga = v / (lu * lv) - cosv * u / (lu * lu);
    const Vec3 gc = u / (lu * lv) - cosv * v / (lv * lv);
    const double f = 2.0 * kAngle * dc;
    grad.segment<3>(3 * t.a) += f * ga;
    grad.segment<3>(3 * t.c) += f * gc;
    grad.segment<3>(3 * t.b) -= f * (ga + gc);
  }
  for (const auto& t : torsions_) {
    const Vec3 b1 = at(x, t.b) - at(x, t.a), b2 = at(x, t.c) - at(x, t.b), b3 = at(x, t.d) - at(x, t.c);
    const Vec3 n1 = b1.cross(b2), n2 = b2.cross(b3);
    const double n1sq = n1.squaredNorm(), n2sq = n2.squaredNorm(), lb2 = b2.norm();
    if (n1sq < 1e-12 || n2sq < 1e-12 || lb2 < 1e-9) continue;
    const double phi = std::atan2(lb2 * b1.dot(n2), n1.dot(n2));
    e += kTorsion * (1.0 - std::cos(2.0 * phi));
    const double dphi = 2.0 * kTorsion * std::sin(2.0 * phi);
    const Vec3 ga = -lb2 / n1sq * n1, gd = lb2 / n2sq * n2;
    const double p = b1.dot(b2) / (lb2 * lb2), q = b3.dot(b2) / (lb2 * lb2);
    const Vec3 gb = q * gd - (1.0 + p) * ga, gc = p * ga - (1.0 + q) * gd;
    grad.segment<3>(3 * t.a) += dphi * ga;
    grad.segment<3>(3 * t.b) += dphi * gb;
    grad.segment<3>(3 * t.c) += dphi * gc;
    grad.segment<3>(3 * t.d) += dphi * gd;
  }
  for (const auto& t : repulsions_) {
    const Vec3 d = at(x, t.a) - at(x, t.b);
    const double r = std::max(d.norm(), 1e-9);
    if (r >= t.rmin) continue;
    const double dr = r - t.rmin;
    e += kRepulsion * dr * dr;
    const Vec3 g = 2.0 * kRepulsion * dr / r * d;
    grad.segment<3>(3 * t.a) += g;
    grad.segment<3>(3 * t.b) -= g;
  }
  return e;
}

namespace {

double gslEnergy(const gsl_vector* v, void* params) {
  const auto* field = static_cast<const ForceField*>(params);
  return field->energy(Eigen::Map<const Eigen::VectorXd>(v->data, static_cast<Eigen::Index>(v->size)));
}

void gslFdf(const gsl_vector* v, void* params, double* f, gsl_vector* g) {
  const auto* field = static_cast<const ForceField*>(params);
  Eigen::VectorXd grad;
  const double e = field->energyAndGradient(Eigen::Map<const Eigen::VectorXd>(v->data, static_cast<Eigen::Index>(v->size)), grad);
  if (f) *f = e;
  std::copy(grad.data(), grad.data() + grad.size(), g->data);
}

void gslGradient(const gsl_vector* v, void* params, gsl_vector* g) { gslFdf(v, params, nullptr, g); }

}  // namespace

OptimizeResult BfgsOptimizer::minimize(const ForceField& field, Eigen::VectorXd& x, int max_iterations) {
  OptimizeResult result;
  const auto n = static_cast<std::size_t>(x.size());
  if (n == 0) {
    result.converged = true;
    return result;
  }
  gsl_multimin_function_fdf fn{&gslEnergy, &gslGradient, &gslFdf, n, const_cast<ForceField*>(&field)};
  gsl_vector* start = gsl_vector_alloc(n);
  std::copy(x.data(), x.data() + x.size(), start->data);
  gsl_multimin_fdfminimizer* s = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n);
  gsl_multimin_fdfminimizer_set(s, &fn, start, 0.01, 0.1);
  gsl_error_handler_t* previous = gsl_set_error_handler_off();
  result.converged = gsl_multimin_test_gradient(s->gradient, tolerance_) == GSL_SUCCESS;
  while (!result.converged && result.iterations < max_iterations) {
    ++result.iterations;
    if (gsl_multimin_fdfminimizer_iterate(s) != GSL_SUCCESS) break;
    result.converged = gsl_multimin_test_gradient(s->gradient, tolerance_) == GSL_SUCCESS;
  }
  gsl_set_error_handler(previous);
  result.energy = s->f;
  std::copy(s->x->data, s->x->data + n, x.data());
  gsl_multimin_fdfminimizer_free(s);
  gsl_vector_free(start);
  return result;
}

chem::Molecule stripHydrogens(const chem::Molecule& mol) {
  chem::Molecule out;
  std::vector<int> map(mol.atomCount(), -1);
  for (int i = 0; i < static_cast<int>(mol.atomCount()); ++i) {
    if (mol.atom(i).element == 1) continue;
    map[static_cast<std::size_t>(i)] = out.addAtom(mol.atom(i));
  }
  for (const auto& b : mol.bonds()) {
    const int a = map[static_cast<std::size_t>(b.begin)], c = map[static_cast<std::size_t>(b.end)];
    if (a >= 0 && c >= 0) out.addBond(a, c, b.order);
  }
  out.perceiveRings();
  return out;
}

Eigen::MatrixX3d embedCoordinates(const chem::Molecule& molecule, std::uint64_t seed) {
  chem::Molecule mol = molecule;
  mol.perceiveRings();
  const auto n = static_cast<Eigen::Index>(mol.atomCount());
  if (n == 0) return Eigen::MatrixX3d(0, 3);
  const double far = 10.0 + 1.5 * static_cast<double>(n);
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(n, n), upper = Eigen::MatrixXd::Constant(n, n, far);
  upper.diagonal().setZero();
  const ForceField field(mol);
  std::vector<std::vector<double>> bond_len(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (const auto& b : field.bonds()) {
    lower(b.a, b.b) = lower(b.b, b.a) = b.r0 - 0.01;
    upper(b.a, b.b) = upper(b.b, b.a) = b.r0 + 0.01;
    bond_len[static_cast<std::size_t>(b.a)][static_cast<std::size_t>(b.b)] = bond_len[static_cast<std::size_t>(b.b)][static_cast<std::size_t>(b.a)] = b.r0;
  }
  for (const auto& t : field.angles()) {
    const double r1 = bond_len[static_cast<std::size_t>(t.a)][static_cast<std::size_t>(t.b)];
    const double r2 = bond_len[static_cast<std::size_t>(t.c)][static_cast<std::size_t>(t.b)];
    const double d = std::sqrt(std::max(r1 * r1 + r2 * r2 - 2 * r1 * r2 * t.cos0, 0.0));
    if (upper(t.a, t.c) < 3.0) continue;  // already fixed by a bond in a 3-ring
    lower(t.a, t.c) = lower(t.c, t.a) = d - 0.05;
    upper(t.a, t.c) = upper(t.c, t.a) = d + 0.05;
  }
  // triangle smoothing of the upper bounds
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) upper(i, j) = std::min(upper(i, j), upper(i, k) + upper(k, j));
  const auto topo = mol.topologicalDistances();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const int t = topo[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (i != j && (t < 0 || t >= 3)) lower(i, j) = repulsionRadius(mol, static_cast<int>(i), static_cast<int>(j), t);
      lower(i, j) = std::min(lower(i, j), upper(i, j));
    }
  Rng rng(seed);
  Eigen::MatrixXd sq(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sq(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = rng.uniform(lower(i, j), upper(i, j));
      sq(i, j) = sq(j, i) = d * d;
    }
  }
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(-0.5 * centering * sq * centering);
  Eigen::MatrixX3d xyz = Eigen::MatrixX3d::Zero(n, 3);
  for (Eigen::Index d = 0; d < std::min<Eigen::Index>(3, n); ++d) {
    const double lambda = std::max(eig.eigenvalues()(n - 1 - d), 0.0);
    xyz.col(d) = eig.eigenvectors().col(n - 1 - d) * std::sqrt(lambda);
  }
  // break exact symmetries the eigenvectors may carry
  for (Eigen::Index i = 0; i < n; ++i)
    for (int d = 0; d < 3; ++d) xyz(i, d) += 0.05 * rng.uniform(-1.0, 1.0);
  return xyz;
}

ConformerResult generateConformer(const chem::Molecule& input, const ConformerParams& params,
                                  ConformerOptimizer* optimizer) {
  require(params.max_attempts >= 1 && params.base_iterations >= 1, ErrorCode::kConfigError,
          "conformer retry schedule needs at least one attempt and one iteration");
  const chem::Molecule mol = stripHydrogens(input);
  ConformerResult result;
  for (const auto& a : mol.atoms()) result.elements.push_back(a.element);
  for (const auto& b : mol.bonds()) result.bonds.emplace_back(b.begin, b.end);
  BfgsOptimizer fallback_optimizer;
  ConformerOptimizer& opt = optimizer ? *optimizer : fallback_optimizer;
  const ForceField field(mol);
  const auto n = static_cast<Eigen::Index>(mol.atomCount());
  for (int attempt = 1; attempt <= params.max_attempts; ++attempt) {
    const Eigen::MatrixX3d start = embedCoordinates(mol, mixSeed({params.seed, static_cast<std::uint64_t>(attempt)}));
    Eigen::VectorXd x(3 * n);
    for (Eigen::Index i = 0; i < n; ++i) x.segment<3>(3 * i) = start.row(i).transpose();
    const long long budget = static_cast<long long>(params.base_iterations) << (attempt - 1);
    const auto outcome = opt.minimize(field, x, static_cast<int>(std::min<long long>(budget, 1LL << 30)));
    result.attempts = attempt;
    if (!outcome.converged || !x.allFinite()) continue;
    Eigen::MatrixX3d coords(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) coords.row(i) = x.segment<3>(3 * i).transpose();
    result.coords = coords;
    result.converged = true;
    result.energy = outcome.energy;
    return result;
  }
  // planar fallback from the depiction, scaled to a typical bond length
  const Eigen::MatrixX2d flat = depictionCoordinates(mol);
  Eigen::MatrixX3d coords = Eigen::MatrixX3d::Zero(n, 3);
  coords.leftCols(2) = 1.5 * flat;
  result.coords = coords;
  result.fallback_2d = true;
  result.energy = field.energy(Eigen::Map<const Eigen::VectorXd>(Eigen::MatrixXd(coords.transpose()).data(), 3 * n));
  return result;
}

ConformerResult generateConformer(std::string_view smiles, const ConformerParams& params,
                                  ConformerOptimizer* optimizer) {
  return generateConformer(chem::parseSmiles(smiles), params, optimizer);
}

}  // namespace ddi::imaging
