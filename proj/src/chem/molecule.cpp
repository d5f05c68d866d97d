// SPDX-License-Identifier: Apache-2.0
#include "ddi/chem/molecule.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>

#include "ddi/chem/elements.hpp"

namespace ddi::chem {

int bondValence(BondOrder order) {
  switch (order) {
    case BondOrder::kSingle: return 1;
    case BondOrder::kDouble: return 2;
    case BondOrder::kTriple: return 3;
    case BondOrder::kQuadruple: return 4;
    case BondOrder::kAromatic: return 1;
  }
  return 1;
}

int Molecule::addAtom(const Atom& atom) {
  atoms_.push_back(atom);
  adjacency_.emplace_back();
  atom_in_ring_.push_back(false);
  return static_cast<int>(atoms_.size()) - 1;
}

int Molecule::addBond(int a, int b, BondOrder order) {
  const int index = static_cast<int>(bonds_.size());
  bonds_.push_back({a, b, order});
  adjacency_[static_cast<std::size_t>(a)].push_back({b, index});
  adjacency_[static_cast<std::size_t>(b)].push_back({a, index});
  bond_in_ring_.push_back(false);
  return index;
}

int Molecule::findBond(int a, int b) const {
  for (const auto& n : neighbors(a)) {
    if (n.atom == b) {
      return n.bond;
    }
  }
  return -1;
}

int Molecule::explicitValence(int atom) const {
  int v = 0;
  for (const auto& n : neighbors(atom)) {
    v += bondValence(bond(n.bond).order);
  }
  return v;
}

int Molecule::aromaticBondCount(int atom) const {
  int c = 0;
  for (const auto& n : neighbors(atom)) {
    c += bond(n.bond).order == BondOrder::kAromatic ? 1 : 0;
  }
  return c;
}

void Molecule::perceiveRings() {
  const std::size_t n = atoms_.size();
  bond_in_ring_.assign(bonds_.size(), false);
  atom_in_ring_.assign(n, false);
  rings_.clear();

  // Bridges (Tarjan low-link) are exactly the acyclic bonds.
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<bool> bridge(bonds_.size(), false);
  int timer = 0;
  std::function<void(int, int)> dfs = [&](int u, int parent_bond) {
    disc[u] = low[u] = timer++;
    for (const auto& nb : adjacency_[static_cast<std::size_t>(u)]) {
      if (nb.bond == parent_bond) {
        continue;
      }
      if (disc[nb.atom] < 0) {
        dfs(nb.atom, nb.bond);
        low[u] = std::min(low[u], low[nb.atom]);
        if (low[nb.atom] > disc[u]) {
          bridge[static_cast<std::size_t>(nb.bond)] = true;
        }
      } else {
        low[u] = std::min(low[u], disc[nb.atom]);
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (disc[i] < 0) {
      dfs(static_cast<int>(i), -1);
    }
  }

  std::set<std::vector<int>> seen;
  for (std::size_t b = 0; b < bonds_.size(); ++b) {
    if (bridge[b]) {
      continue;
    }
    bond_in_ring_[b] = true;
    const int src = bonds_[b].begin;
    const int dst = bonds_[b].end;
    atom_in_ring_[static_cast<std::size_t>(src)] = true;
    atom_in_ring_[static_cast<std::size_t>(dst)] = true;

    // Shortest path src -> dst avoiding bond b closes the smallest ring through b.
    std::vector<int> prev(n, -2);
    std::queue<int> q;
    q.push(src);
    prev[static_cast<std::size_t>(src)] = -1;
    while (!q.empty() && prev[static_cast<std::size_t>(dst)] == -2) {
      const int u = q.front();
      q.pop();
      for (const auto& nb : adjacency_[static_cast<std::size_t>(u)]) {
        if (nb.bond == static_cast<int>(b) || bridge[static_cast<std::size_t>(nb.bond)] ||
            prev[static_cast<std::size_t>(nb.atom)] != -2) {
          continue;
        }
        prev[static_cast<std::size_t>(nb.atom)] = u;
        q.push(nb.atom);
      }
    }
    std::vector<int> ring;
    for (int v = dst; v != -1; v = prev[static_cast<std::size_t>(v)]) {
      ring.push_back(v);
    }
    std::vector<int> key = ring;
    std::sort(key.begin(), key.end());
    if (seen.insert(key).second) {
      rings_.push_back(std::move(ring));
    }
  }
  std::sort(rings_.begin(), rings_.end(),
            [](const auto& a, const auto& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; });
}

std::vector<std::vector<int>> Molecule::components() const {
  std::vector<int> label(atoms_.size(), -1);
  std::vector<std::vector<int>> out;
  for (std::size_t s = 0; s < atoms_.size(); ++s) {
    if (label[s] >= 0) {
      continue;
    }
    std::vector<int> comp;
    std::vector<int> stack{static_cast<int>(s)};
    label[s] = static_cast<int>(out.size());
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (const auto& nb : adjacency_[static_cast<std::size_t>(u)]) {
        if (label[static_cast<std::size_t>(nb.atom)] < 0) {
          label[static_cast<std::size_t>(nb.atom)] = static_cast<int>(out.size());
          stack.push_back(nb.atom);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<std::vector<int>> Molecule::topologicalDistances() const {
  const std::size_t n = atoms_.size();
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  for (std::size_t s = 0; s < n; ++s) {
    std::queue<int> q;
    q.push(static_cast<int>(s));
    dist[s][s] = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const auto& nb : adjacency_[static_cast<std::size_t>(u)]) {
        auto& d = dist[s][static_cast<std::size_t>(nb.atom)];
        if (d < 0) {
          d = dist[s][static_cast<std::size_t>(u)] + 1;
          q.push(nb.atom);
        }
      }
    }
  }
  return dist;
}

int impliedHydrogens(const Molecule& mol, int index) {
  const Atom& a = mol.atom(index);
  if (!isOrganicSubset(a.element) || a.charge != 0 || a.isotope != 0) {
    return -1;
  }
  if (a.aromatic) {
    if (a.element != 6) {
      return 0;
    }
    const int arom = mol.aromaticBondCount(index);
    const int other = mol.explicitValence(index) - arom;
    return std::max(0, 4 - (arom + 1) - other);
  }
  const int v = mol.explicitValence(index);
  for (int allowed : defaultValences(a.element)) {
    if (allowed >= v) {
      return allowed - v;
    }
  }
  return -1;
}

}  // namespace ddi::chem
