// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ddi/chem/molecule.hpp"

namespace ddi::chem {

//! Parses a SMILES string into a hydrogen-suppressed graph. Stereo marks are
//! accepted and discarded; Kekulé rings are converted to aromatic form.
//! Throws Error(kInvalidSmiles) on syntax or valence errors.
Molecule parseSmiles(std::string_view smiles);

//! Marks 5- to 7-membered rings with 4n+2 pi electrons as aromatic.
void perceiveAromaticity(Molecule& mol);

//! Canonical atom ranks (a permutation of 0..n-1).
std::vector<int> canonicalRanks(const Molecule& mol);

//! Unique SMILES for the graph: identical output for any input ordering of
//! the same molecule. Disconnected components are sorted and joined by '.'.
std::string canonicalSmiles(const Molecule& mol);

//! parseSmiles followed by canonicalSmiles.
std::string canonicalize(std::string_view smiles);

}  // namespace ddi::chem
