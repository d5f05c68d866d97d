// SPDX-License-Identifier: Apache-2.0
#include "ddi/chem/brics.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "ddi/chem/smiles.hpp"

namespace ddi::chem {
namespace {

enum Env { L1, L3, L4, L5, L6, L7, L8, L9, L10, L11, L12, L13, L14, L15, L16, kEnvCount };

constexpr std::array<int, kEnvCount> kLabel = {1, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};

struct Rule {
  Env first;
  Env second;
  BondOrder order;
};

constexpr BondOrder kS = BondOrder::kSingle;

// Compatibility table, tried in this order.
constexpr Rule kRules[] = {
    {L1, L3, kS},   {L1, L5, kS},   {L1, L10, kS},  {L3, L4, kS},   {L3, L13, kS},  {L3, L14, kS},
    {L3, L15, kS},  {L3, L16, kS},  {L4, L5, kS},   {L4, L11, kS},  {L5, L12, kS},  {L5, L14, kS},
    {L5, L16, kS},  {L5, L13, kS},  {L5, L15, kS},  {L6, L13, kS},  {L6, L14, kS},  {L6, L15, kS},
    {L6, L16, kS},  {L7, L7, BondOrder::kDouble},   {L8, L9, kS},   {L8, L10, kS},  {L8, L13, kS},
    {L8, L14, kS},  {L8, L15, kS},  {L8, L16, kS},  {L9, L13, kS},  {L9, L14, kS},  {L9, L15, kS},
    {L9, L16, kS},  {L10, L13, kS}, {L10, L14, kS}, {L10, L15, kS}, {L10, L16, kS}, {L11, L13, kS},
    {L11, L14, kS}, {L11, L15, kS}, {L11, L16, kS}, {L13, L14, kS}, {L13, L15, kS}, {L13, L16, kS},
    {L14, L14, kS}, {L14, L15, kS}, {L14, L16, kS}, {L15, L16, kS}, {L16, L16, kS},
};

class EnvMatcher {
 public:
  explicit EnvMatcher(const Molecule& mol) : m_(mol) {}

  bool matches(Env env, int a) const {
    switch (env) {
      case L1: return l1(a);
      case L3: return l3(a);
      case L4: return l4(a);
      case L5: return l5(a);
      case L6: return l6(a);
      case L7: return l7(a);
      case L8: return l8(a);
      case L9: return l9(a);
      case L10: return l10(a);
      case L11: return l11(a);
      case L12: return l12(a);
      case L13: return l13(a);
      case L14: return l14(a);
      case L15: return l15(a);
      case L16: return l16(a);
      default: return false;
    }
  }

 private:
  bool aliphatic(int a, int z) const { return m_.atom(a).element == z && !m_.atom(a).aromatic; }
  bool aromaticAtom(int a, int z) const { return m_.atom(a).element == z && m_.atom(a).aromatic; }
  BondOrder order(const Neighbor& nb) const { return m_.bond(nb.bond).order; }
  bool ring(const Neighbor& nb) const { return m_.isRingBond(nb.bond); }
  // SMARTS bond with no symbol: single or aromatic.
  bool plain(const Neighbor& nb) const { return order(nb) == kS || order(nb) == BondOrder::kAromatic; }
  bool elementIn(int a, std::initializer_list<int> zs) const {
    return std::find(zs.begin(), zs.end(), m_.atom(a).element) != zs.end();
  }
  bool hasDouble(int a) const {
    for (const auto& nb : m_.neighbors(a)) {
      if (order(nb) == BondOrder::kDouble) return true;
    }
    return false;
  }
  bool doubleToAliphaticO(int a, int exclude = -1) const {
    for (const auto& nb : m_.neighbors(a)) {
      if (nb.atom != exclude && order(nb) == BondOrder::kDouble && aliphatic(nb.atom, 8)) return true;
    }
    return false;
  }
  // True when two distinct neighbours satisfy p and q respectively.
  template <typename P, typename Q>
  bool twoNeighbors(int a, P p, Q q) const {
    const auto nbs = m_.neighbors(a);
    for (std::size_t i = 0; i < nbs.size(); ++i) {
      if (!p(nbs[i])) continue;
      for (std::size_t j = 0; j < nbs.size(); ++j) {
        if (i != j && q(nbs[j])) return true;
      }
    }
    return false;
  }
  template <typename P>
  bool anyNeighbor(int a, P p) const {
    for (const auto& nb : m_.neighbors(a)) {
      if (p(nb)) return true;
    }
    return false;
  }

  // [C;D3]([#0,#6,#7,#8])(=O)
  bool l1(int a) const {
    if (!aliphatic(a, 6) || m_.degree(a) != 3) return false;
    return twoNeighbors(
        a, [&](const Neighbor& n) { return plain(n) && elementIn(n.atom, {0, 6, 7, 8}); },
        [&](const Neighbor& n) { return order(n) == BondOrder::kDouble && aliphatic(n.atom, 8); });
  }
  // [O;D2]-;!@[#0,#6,#1]
  bool l3(int a) const {
    if (!aliphatic(a, 8) || m_.degree(a) != 2) return false;
    return anyNeighbor(a, [&](const Neighbor& n) { return order(n) == kS && !ring(n) && elementIn(n.atom, {0, 6, 1}); });
  }
  // [C;!D1;!$(C=*)]-;!@[#6]
  bool l4(int a) const {
    if (!aliphatic(a, 6) || m_.degree(a) == 1 || hasDouble(a)) return false;
    return anyNeighbor(a, [&](const Neighbor& n) { return order(n) == kS && !ring(n) && elementIn(n.atom, {6}); });
  }
  // [N;!D1;!$(N=*);!$(N-[!#6;!#16;!#0;!#1]);!$([N;R]@[C;R]=O)]
  bool l5(int a) const {
    if (!aliphatic(a, 7) || m_.degree(a) == 1 || hasDouble(a)) return false;
    if (anyNeighbor(a, [&](const Neighbor& n) { return order(n) == kS && !elementIn(n.atom, {6, 16, 0, 1}); })) {
      return false;
    }
    if (m_.isRingAtom(a) && anyNeighbor(a, [&](const Neighbor& n) {
          return ring(n) && aliphatic(n.atom, 6) && m_.isRingAtom(n.atom) && doubleToAliphaticO(n.atom);
        })) {
      return false;
    }
    return true;
  }
  // [C;D3;!R](=O)-;!@[#0,#6,#7,#8]
  bool l6(int a) const {
    if (!aliphatic(a, 6) || m_.degree(a) != 3 || m_.isRingAtom(a)) return false;
    return twoNeighbors(
        a, [&](const Neighbor& n) { return order(n) == BondOrder::kDouble && aliphatic(n.atom, 8); },
        [&](const Neighbor& n) { return order(n) == kS && !ring(n) && elementIn(n.atom, {0, 6, 7, 8}); });
  }
  // [C;D2,D3]-[#6]
  bool l7(int a) const {
    if (!aliphatic(a, 6) || (m_.degree(a) != 2 && m_.degree(a) != 3)) return false;
    return anyNeighbor(a, [&](const Neighbor& n) { return order(n) == kS && elementIn(n.atom, {6}); });
  }
  // [C;!R;!D1;!$(C!-*)]
  bool l8(int a) const {
    if (!aliphatic(a, 6) || m_.isRingAtom(a) || m_.degree(a) == 1) return false;
    return !anyNeighbor(a, [&](const Neighbor& n) { return order(n) != kS; });
  }
  // [n;+0;$(n(:[c,n,o,s]):[c,n,o,s])]
  bool l9(int a) const {
    if (!aromaticAtom(a, 7) || m_.atom(a).charge != 0) return false;
    auto p = [&](const Neighbor& n) {
      return order(n) == BondOrder::kAromatic && m_.atom(n.atom).aromatic && elementIn(n.atom, {6, 7, 8, 16});
    };
    return twoNeighbors(a, p, p);
  }
  // [N;R;$(N(@C(=O))@[C,N,O,S])]
  bool l10(int a) const {
    if (!aliphatic(a, 7) || !m_.isRingAtom(a)) return false;
    return twoNeighbors(
        a, [&](const Neighbor& n) { return ring(n) && aliphatic(n.atom, 6) && doubleToAliphaticO(n.atom, a); },
        [&](const Neighbor& n) {
          return ring(n) && !m_.atom(n.atom).aromatic && elementIn(n.atom, {6, 7, 8, 16});
        });
  }
  // [S;D2](-;!@[#0,#6])
  bool l11(int a) const {
    if (!aliphatic(a, 16) || m_.degree(a) != 2) return false;
    return anyNeighbor(a, [&](const Neighbor& n) { return order(n) == kS && !ring(n) && elementIn(n.atom, {0, 6}); });
  }
  // [S;D4]([#6,#0])(=O)(=O)
  bool l12(int a) const {
    if (!aliphatic(a, 16) || m_.degree(a) != 4) return false;
    int oxo = 0;
    bool carbon = false;
    for (const auto& n : m_.neighbors(a)) {
      if (order(n) == BondOrder::kDouble && aliphatic(n.atom, 8)) ++oxo;
      if (plain(n) && elementIn(n.atom, {6, 0})) carbon = true;
    }
    return oxo >= 2 && carbon;
  }
  // [C;$(C(-;@[C,N,O,S])-;@[N,O,S])]
  bool l13(int a) const {
    if (!aliphatic(a, 6)) return false;
    return twoNeighbors(
        a,
        [&](const Neighbor& n) {
          return order(n) == kS && ring(n) && !m_.atom(n.atom).aromatic && elementIn(n.atom, {6, 7, 8, 16});
        },
        [&](const Neighbor& n) {
          return order(n) == kS && ring(n) && !m_.atom(n.atom).aromatic && elementIn(n.atom, {7, 8, 16});
        });
  }
  // [c;$(c(:[c,n,o,s]):[n,o,s])]
  bool l14(int a) const {
    if (!aromaticAtom(a, 6)) return false;
    return twoNeighbors(
        a,
        [&](const Neighbor& n) {
          return order(n) == BondOrder::kAromatic && m_.atom(n.atom).aromatic && elementIn(n.atom, {6, 7, 8, 16});
        },
        [&](const Neighbor& n) {
          return order(n) == BondOrder::kAromatic && m_.atom(n.atom).aromatic && elementIn(n.atom, {7, 8, 16});
        });
  }
  // [C;$(C(-;@C)-;@C)]
  bool l15(int a) const {
    if (!aliphatic(a, 6)) return false;
    auto p = [&](const Neighbor& n) { return order(n) == kS && ring(n) && aliphatic(n.atom, 6); };
    return twoNeighbors(a, p, p);
  }
  // [c;$(c(:c):c)]
  bool l16(int a) const {
    if (!aromaticAtom(a, 6)) return false;
    auto p = [&](const Neighbor& n) { return order(n) == BondOrder::kAromatic && aromaticAtom(n.atom, 6); };
    return twoNeighbors(a, p, p);
  }

  const Molecule& m_;
};

}  // namespace

std::vector<BricsBond> findBricsBonds(const Molecule& mol) {
  EnvMatcher matcher(mol);
  const std::size_t n = mol.atomCount();
  std::vector<std::array<bool, kEnvCount>> env(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (int e = 0; e < kEnvCount; ++e) {
      env[a][static_cast<std::size_t>(e)] = matcher.matches(static_cast<Env>(e), static_cast<int>(a));
    }
  }
  std::vector<BricsBond> out;
  for (std::size_t b = 0; b < mol.bondCount(); ++b) {
    const Bond& bond = mol.bond(static_cast<int>(b));
    if (mol.isRingBond(static_cast<int>(b))) continue;
    const int u = std::min(bond.begin, bond.end);
    const int v = std::max(bond.begin, bond.end);
    for (const Rule& rule : kRules) {
      if (bond.order != rule.order) continue;
      const auto e1 = static_cast<std::size_t>(rule.first);
      const auto e2 = static_cast<std::size_t>(rule.second);
      int label_u = 0;
      int label_v = 0;
      if (env[static_cast<std::size_t>(u)][e1] && env[static_cast<std::size_t>(v)][e2]) {
        label_u = kLabel[e1];
        label_v = kLabel[e2];
      } else if (env[static_cast<std::size_t>(v)][e1] && env[static_cast<std::size_t>(u)][e2]) {
        label_u = kLabel[e2];
        label_v = kLabel[e1];
      } else {
        continue;
      }
      BricsBond hit;
      hit.bond = static_cast<int>(b);
      hit.begin_label = bond.begin == u ? label_u : label_v;
      hit.end_label = bond.begin == u ? label_v : label_u;
      out.push_back(hit);
      break;
    }
  }
  return out;
}

Molecule breakBricsBonds(const Molecule& mol, const std::vector<BricsBond>& bonds, std::vector<int>* origin) {
  std::set<int> cut;
  for (const auto& b : bonds) cut.insert(b.bond);
  Molecule out;
  std::vector<int> src;
  for (std::size_t i = 0; i < mol.atomCount(); ++i) {
    out.addAtom(mol.atom(static_cast<int>(i)));
    src.push_back(static_cast<int>(i));
  }
  for (std::size_t b = 0; b < mol.bondCount(); ++b) {
    if (cut.count(static_cast<int>(b))) continue;
    const Bond& bond = mol.bond(static_cast<int>(b));
    out.addBond(bond.begin, bond.end, bond.order);
  }
  for (const auto& b : bonds) {
    const Bond& bond = mol.bond(b.bond);
    Atom dummy;
    dummy.element = 0;
    dummy.isotope = b.begin_label;
    const int d1 = out.addAtom(dummy);
    out.addBond(bond.begin, d1, bond.order);
    src.push_back(bond.begin);
    dummy.isotope = b.end_label;
    const int d2 = out.addAtom(dummy);
    out.addBond(bond.end, d2, bond.order);
    src.push_back(bond.end);
  }
  out.perceiveRings();
  if (origin) *origin = std::move(src);
  return out;
}

std::vector<std::string> bricsFragments(const Molecule& mol) {
  std::vector<int> origin;
  const Molecule broken = breakBricsBonds(mol, findBricsBonds(mol), &origin);
  std::vector<std::pair<int, std::vector<int>>> comps;
  for (auto& comp : broken.components()) {
    int first = static_cast<int>(mol.atomCount());
    for (int a : comp) first = std::min(first, origin[static_cast<std::size_t>(a)]);
    comps.emplace_back(first, std::move(comp));
  }
  std::sort(comps.begin(), comps.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  std::vector<std::string> fragments;
  std::set<std::string> seen;
  for (const auto& [first, comp] : comps) {
    Molecule frag;
    std::map<int, int> remap;
    for (int a : comp) remap[a] = frag.addAtom(broken.atom(a));
    for (const auto& bond : broken.bonds()) {
      auto it = remap.find(bond.begin);
      if (it != remap.end()) frag.addBond(it->second, remap.at(bond.end), bond.order);
    }
    frag.perceiveRings();
    std::string smi = canonicalSmiles(frag);
    if (seen.insert(smi).second) fragments.push_back(std::move(smi));
  }
  return fragments;
}

}  // namespace ddi::chem
