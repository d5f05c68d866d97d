// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ddi/chem/molecule.hpp"

namespace ddi::chem {

//! A cleavable bond and the environment label (1..16) on each side.
struct BricsBond {
  int bond = -1;
  int begin_label = 0;
  int end_label = 0;
};

//! Bonds matched by the BRICS environment/compatibility rules. Each bond is
//! reported once, labelled by the first rule (in rule-table order) it satisfies.
std::vector<BricsBond> findBricsBonds(const Molecule& mol);

//! Copy of the molecule with the given bonds removed and an isotope-labelled
//! attachment atom ("[n*]") added on each side. origin[i] is the source atom of
//! atom i in the result (attachment atoms map to the atom they hang from).
Molecule breakBricsBonds(const Molecule& mol, const std::vector<BricsBond>& bonds,
                         std::vector<int>* origin = nullptr);

//! Canonical fragment SMILES of a molecule after cleaving every BRICS bond.
//! Fragments are unique and ordered by their smallest source-atom index; a
//! molecule with no cleavable bond yields its own canonical SMILES.
std::vector<std::string> bricsFragments(const Molecule& mol);

}  // namespace ddi::chem
