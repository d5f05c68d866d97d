// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ddi::chem {

enum class BondOrder : std::uint8_t { kSingle, kDouble, kTriple, kQuadruple, kAromatic };

//! Integer valence contribution; aromatic bonds count as one here.
int bondValence(BondOrder order);

struct Atom {
  int element = 6;  // 0 denotes an attachment point ("*")
  int charge = 0;
  int isotope = 0;
  int hydrogens = 0;  // total attached hydrogens (always implicit in this model)
  bool aromatic = false;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::kSingle;

  int other(int atom) const noexcept { return atom == begin ? end : begin; }
};

struct Neighbor {
  int atom;
  int bond;
};

//! Hydrogen-suppressed molecular graph. Ring membership is recomputed by
//! perceiveRings() and is valid only until the next structural edit.
class Molecule {
 public:
  int addAtom(const Atom& atom);
  int addBond(int a, int b, BondOrder order);

  std::size_t atomCount() const noexcept { return atoms_.size(); }
  std::size_t bondCount() const noexcept { return bonds_.size(); }

  const Atom& atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  Atom& atom(int i) { return atoms_[static_cast<std::size_t>(i)]; }
  const Bond& bond(int i) const { return bonds_[static_cast<std::size_t>(i)]; }
  Bond& bond(int i) { return bonds_[static_cast<std::size_t>(i)]; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::span<const Bond> bonds() const noexcept { return bonds_; }

  std::span<const Neighbor> neighbors(int atom) const { return adjacency_[static_cast<std::size_t>(atom)]; }
  int degree(int atom) const { return static_cast<int>(adjacency_[static_cast<std::size_t>(atom)].size()); }

  //! Bond index between a and b, or -1.
  int findBond(int a, int b) const;

  //! Sum of bond valences of explicit neighbours (aromatic counted as 1).
  int explicitValence(int atom) const;
  int aromaticBondCount(int atom) const;

  void perceiveRings();
  bool isRingBond(int bond) const { return bond_in_ring_[static_cast<std::size_t>(bond)]; }
  bool isRingAtom(int atom) const { return atom_in_ring_[static_cast<std::size_t>(atom)]; }

  //! Smallest ring through every ring bond, deduplicated; atoms in ring order.
  const std::vector<std::vector<int>>& rings() const noexcept { return rings_; }

  //! Connected components as sorted atom lists ordered by smallest atom index.
  std::vector<std::vector<int>> components() const;

  //! Shortest path lengths (in bonds) between all atom pairs; -1 if disconnected.
  std::vector<std::vector<int>> topologicalDistances() const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<bool> bond_in_ring_;
  std::vector<bool> atom_in_ring_;
  std::vector<std::vector<int>> rings_;
};

//! Hydrogen count that SMILES would imply for an unbracketed atom with the
//! current bonding, or -1 when the atom cannot be written unbracketed.
int impliedHydrogens(const Molecule& mol, int atom);

}  // namespace ddi::chem
