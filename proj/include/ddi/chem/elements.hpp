// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace ddi::chem {

//! Symbol for atomic number z; "*" for 0 (attachment point).
std::string_view elementSymbol(int z);

//! Atomic number for a symbol with standard capitalisation, e.g. "Cl".
std::optional<int> elementFromSymbol(std::string_view symbol);

//! True for the SMILES organic subset (B C N O P S F Cl Br I).
bool isOrganicSubset(int z);

//! Allowed neutral valences in ascending order for organic-subset elements.
std::span<const int> defaultValences(int z);

//! Largest valence accepted for an atom with the given charge, or nullopt when
//! the element is not validated.
std::optional<int> maxValence(int z, int charge);

double covalentRadius(int z);
double vdwRadius(int z);

//! CPK-style display colour as 8-bit RGB.
struct Rgb {
  unsigned char r, g, b;
};
Rgb elementColor(int z);

}  // namespace ddi::chem
