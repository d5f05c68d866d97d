// SPDX-License-Identifier: Apache-2.0
#include "ddi/chem/elements.hpp"

#include <array>

namespace ddi::chem {
namespace {

constexpr std::array<std::string_view, 119> kSymbols = {
    "*",  "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si", "P",  "S",
    "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn",
    "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho",
    "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
    "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md",
    "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

constexpr int kB[] = {3};
constexpr int kC[] = {4};
constexpr int kN[] = {3, 5};
constexpr int kO[] = {2};
constexpr int kP[] = {3, 5};
constexpr int kS[] = {2, 4, 6};
constexpr int kHalogen[] = {1};

}  // namespace

std::string_view elementSymbol(int z) {
  if (z < 0 || z >= static_cast<int>(kSymbols.size())) {
    return "?";
  }
  return kSymbols[static_cast<std::size_t>(z)];
}

std::optional<int> elementFromSymbol(std::string_view symbol) {
  for (std::size_t z = 1; z < kSymbols.size(); ++z) {
    if (kSymbols[z] == symbol) {
      return static_cast<int>(z);
    }
  }
  return std::nullopt;
}

bool isOrganicSubset(int z) {
  switch (z) {
    case 5: case 6: case 7: case 8: case 9: case 15: case 16: case 17: case 35: case 53:
      return true;
    default:
      return false;
  }
}

std::span<const int> defaultValences(int z) {
  switch (z) {
    case 5: return kB;
    case 6: return kC;
    case 7: return kN;
    case 8: return kO;
    case 15: return kP;
    case 16: return kS;
    case 9: case 17: case 35: case 53: return kHalogen;
    default: return {};
  }
}

std::optional<int> maxValence(int z, int charge) {
  switch (z) {
    case 1: return charge == 0 ? 1 : 0;
    case 5: return 3 + (charge < 0 ? 1 : 0);
    case 6: return 4 - (charge != 0 ? 1 : 0);
    case 7: return 3 + charge;
    case 8: return 2 + charge;
    case 9: return 1 + (charge > 0 ? 1 : 0);
    case 15: return 5 + (charge > 0 ? 1 : 0);
    case 16: return 6;
    case 17: case 35: case 53: return 7;
    default: return std::nullopt;
  }
}

double covalentRadius(int z) {
  switch (z) {
    case 0: return 0.7;
    case 1: return 0.31;
    case 5: return 0.84;
    case 6: return 0.76;
    case 7: return 0.71;
    case 8: return 0.66;
    case 9: return 0.57;
    case 14: return 1.11;
    case 15: return 1.07;
    case 16: return 1.05;
    case 17: return 1.02;
    case 34: return 1.20;
    case 35: return 1.20;
    case 53: return 1.39;
    default: return 1.3;
  }
}

double vdwRadius(int z) {
  switch (z) {
    case 1: return 1.10;
    case 6: return 1.70;
    case 7: return 1.55;
    case 8: return 1.52;
    case 9: return 1.47;
    case 15: return 1.80;
    case 16: return 1.80;
    case 17: return 1.75;
    case 35: return 1.85;
    case 53: return 1.98;
    default: return 1.80;
  }
}

Rgb elementColor(int z) {
  switch (z) {
    case 0: return {255, 105, 180};
    case 1: return {230, 230, 230};
    case 6: return {51, 230, 51};  // green carbon, as in common stick-ball viewers
    case 7: return {51, 51, 255};
    case 8: return {255, 51, 51};
    case 9: return {179, 255, 255};
    case 15: return {255, 128, 0};
    case 16: return {230, 198, 64};
    case 17: return {31, 240, 31};
    case 35: return {166, 41, 41};
    case 53: return {148, 0, 148};
    default: return {200, 128, 200};
  }
}

}  // namespace ddi::chem
