// SPDX-License-Identifier: Apache-2.0
#include "ddi/chem/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "ddi/chem/elements.hpp"
#include "ddi/common/error.hpp"

namespace ddi::chem {
namespace {

[[noreturn]] void invalid(std::string_view smiles, std::size_t pos, const std::string& what) {
  fail(ErrorCode::kInvalidSmiles,
       "invalid SMILES '" + std::string(smiles) + "' at position " + std::to_string(pos) + ": " + what);
}

struct ParsedAtom {
  Atom atom;
  bool bracket = false;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Molecule run() {
    if (s_.empty()) {
      invalid(s_, 0, "empty string");
    }
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '(') {
        if (prev_ < 0) invalid(s_, pos_, "branch without preceding atom");
        branches_.push_back(prev_);
        ++pos_;
      } else if (c == ')') {
        if (branches_.empty()) invalid(s_, pos_, "unmatched ')'");
        if (pending_) invalid(s_, pos_, "bond before ')'");
        prev_ = branches_.back();
        branches_.pop_back();
        ++pos_;
      } else if (c == '.') {
        if (pending_) invalid(s_, pos_, "bond before '.'");
        prev_ = -1;
        ++pos_;
      } else if (c == '-' || c == '=' || c == '#' || c == '$' || c == ':' || c == '/' || c == '\\') {
        if (pending_) invalid(s_, pos_, "two consecutive bond symbols");
        if (prev_ < 0) invalid(s_, pos_, "bond without preceding atom");
        pending_ = bondFromChar(c);
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        ringClosure();
      } else if (c == '[') {
        addAtom(parseBracket());
      } else {
        addAtom(parseOrganic());
      }
    }
    if (!open_rings_.empty()) invalid(s_, s_.size(), "unclosed ring " + std::to_string(open_rings_.begin()->first));
    if (!branches_.empty()) invalid(s_, s_.size(), "unclosed branch");
    if (pending_) invalid(s_, s_.size(), "trailing bond");
    return finish();
  }

 private:
  static BondOrder bondFromChar(char c) {
    switch (c) {
      case '=': return BondOrder::kDouble;
      case '#': return BondOrder::kTriple;
      case '$': return BondOrder::kQuadruple;
      case ':': return BondOrder::kAromatic;
      default: return BondOrder::kSingle;
    }
  }

  BondOrder defaultOrder(int a, int b) const {
    return atoms_[static_cast<std::size_t>(a)].atom.aromatic && atoms_[static_cast<std::size_t>(b)].atom.aromatic
               ? BondOrder::kAromatic
               : BondOrder::kSingle;
  }

  void connect(int a, int b, BondOrder order, std::size_t at) {
    if (a == b) invalid(s_, at, "atom bonded to itself");
    for (const auto& [x, y, o] : bonds_) {
      if ((x == a && y == b) || (x == b && y == a)) invalid(s_, at, "duplicate bond");
    }
    bonds_.push_back({a, b, order});
  }

  void addAtom(const ParsedAtom& atom) {
    atoms_.push_back(atom);
    const int idx = static_cast<int>(atoms_.size()) - 1;
    if (prev_ >= 0) {
      connect(prev_, idx, pending_ ? *pending_ : defaultOrder(prev_, idx), pos_);
    }
    pending_.reset();
    prev_ = idx;
  }

  void ringClosure() {
    const std::size_t start = pos_;
    int number = 0;
    if (s_[pos_] == '%') {
      if (pos_ + 2 >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2]))) {
        invalid(s_, pos_, "malformed %nn ring closure");
      }
      number = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      number = s_[pos_] - '0';
      ++pos_;
    }
    if (prev_ < 0) invalid(s_, start, "ring closure without atom");
    auto it = open_rings_.find(number);
    if (it == open_rings_.end()) {
      open_rings_[number] = {prev_, pending_};
    } else {
      const auto [partner, opened_order] = it->second;
      open_rings_.erase(it);
      BondOrder order = defaultOrder(partner, prev_);
      if (opened_order && pending_ && *opened_order != *pending_) {
        const bool directional = (*opened_order == BondOrder::kSingle && *pending_ == BondOrder::kSingle);
        if (!directional) invalid(s_, start, "conflicting ring-closure bond orders");
      }
      if (pending_) {
        order = *pending_;
      } else if (opened_order) {
        order = *opened_order;
      }
      connect(partner, prev_, order, start);
    }
    pending_.reset();
  }

  ParsedAtom parseOrganic() {
    ParsedAtom out;
    const char c = s_[pos_];
    auto next = [&](char x) { return pos_ + 1 < s_.size() && s_[pos_ + 1] == x; };
    switch (c) {
      case '*': out.atom.element = 0; ++pos_; return out;
      case 'B':
        if (next('r')) { out.atom.element = 35; pos_ += 2; } else { out.atom.element = 5; ++pos_; }
        return out;
      case 'C':
        if (next('l')) { out.atom.element = 17; pos_ += 2; } else { out.atom.element = 6; ++pos_; }
        return out;
      case 'N': out.atom.element = 7; ++pos_; return out;
      case 'O': out.atom.element = 8; ++pos_; return out;
      case 'P': out.atom.element = 15; ++pos_; return out;
      case 'S': out.atom.element = 16; ++pos_; return out;
      case 'F': out.atom.element = 9; ++pos_; return out;
      case 'I': out.atom.element = 53; ++pos_; return out;
      case 'b': out.atom.element = 5; out.atom.aromatic = true; ++pos_; return out;
      case 'c': out.atom.element = 6; out.atom.aromatic = true; ++pos_; return out;
      case 'n': out.atom.element = 7; out.atom.aromatic = true; ++pos_; return out;
      case 'o': out.atom.element = 8; out.atom.aromatic = true; ++pos_; return out;
      case 'p': out.atom.element = 15; out.atom.aromatic = true; ++pos_; return out;
      case 's': out.atom.element = 16; out.atom.aromatic = true; ++pos_; return out;
      default: invalid(s_, pos_, std::string("unexpected character '") + c + "'");
    }
  }

  int readInt() {
    int v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      ++pos_;
    }
    return v;
  }

  ParsedAtom parseBracket() {
    const std::size_t start = pos_;
    ++pos_;  // '['
    ParsedAtom out;
    out.bracket = true;
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      out.atom.isotope = readInt();
    }
    if (pos_ >= s_.size()) invalid(s_, start, "unterminated bracket atom");

    // element symbol
    static const std::pair<std::string_view, int> kAromatic[] = {{"se", 34}, {"as", 33}, {"te", 52}, {"c", 6},
                                                                 {"n", 7},   {"o", 8},   {"p", 15},  {"s", 16},
                                                                 {"b", 5}};
    const char c = s_[pos_];
    if (c == '*') {
      out.atom.element = 0;
      ++pos_;
    } else if (std::islower(static_cast<unsigned char>(c))) {
      bool found = false;
      for (const auto& [sym, z] : kAromatic) {
        if (s_.substr(pos_, sym.size()) == sym) {
          out.atom.element = z;
          out.atom.aromatic = true;
          pos_ += sym.size();
          found = true;
          break;
        }
      }
      if (!found) invalid(s_, pos_, "unknown aromatic symbol");
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      std::optional<int> z;
      if (pos_ + 1 < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_ + 1]))) {
        z = elementFromSymbol(s_.substr(pos_, 2));
        if (z) pos_ += 2;
      }
      if (!z) {
        z = elementFromSymbol(s_.substr(pos_, 1));
        if (!z) invalid(s_, pos_, "unknown element");
        pos_ += 1;
      }
      out.atom.element = *z;
    } else {
      invalid(s_, pos_, "missing element in bracket atom");
    }

    // chirality (discarded)
    if (pos_ < s_.size() && s_[pos_] == '@') {
      ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '@') {
        ++pos_;
      } else if (pos_ + 1 < s_.size()) {
        const auto tag = s_.substr(pos_, 2);
        if (tag == "TH" || tag == "AL" || tag == "SP" || tag == "TB" || tag == "OH") {
          pos_ += 2;
          readInt();
        }
      }
    }
    // hydrogens
    if (pos_ < s_.size() && s_[pos_] == 'H') {
      ++pos_;
      out.atom.hydrogens = 1;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        out.atom.hydrogens = readInt();
      }
    }
    // charge
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      const char sign = s_[pos_];
      int magnitude = 1;
      ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        magnitude = readInt();
      } else {
        while (pos_ < s_.size() && s_[pos_] == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      out.atom.charge = sign == '+' ? magnitude : -magnitude;
    }
    // atom class (discarded)
    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      readInt();
    }
    if (pos_ >= s_.size() || s_[pos_] != ']') invalid(s_, start, "malformed bracket atom");
    ++pos_;
    return out;
  }

  Molecule finish() {
    Molecule full;
    for (const auto& pa : atoms_) {
      full.addAtom(pa.atom);
    }
    for (const auto& [a, b, order] : bonds_) {
      full.addBond(a, b, order);
    }
    full.perceiveRings();

    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const int idx = static_cast<int>(i);
      Atom& atom = full.atom(idx);
      if (atom.aromatic && !full.isRingAtom(idx)) {
        invalid(s_, 0, "non-ring atom marked aromatic");
      }
      if (!atoms_[i].bracket) {
        if (atom.element == 0) {
          atom.hydrogens = 0;
          continue;
        }
        const int h = impliedHydrogens(full, idx);
        if (h < 0) invalid(s_, 0, "valence exceeded on atom " + std::to_string(i));
        atom.hydrogens = h;
      } else {
        const int arom = full.aromaticBondCount(idx);
        const int total = full.explicitValence(idx) + atom.hydrogens + (arom > 0 && atom.element == 6 ? 1 : 0);
        if (auto maxv = maxValence(atom.element, atom.charge); maxv && total > *maxv) {
          invalid(s_, 0, "valence exceeded on atom " + std::to_string(i));
        }
      }
    }

    // Fold explicit [H] atoms into their heavy neighbour.
    std::vector<bool> drop(atoms_.size(), false);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const Atom& a = full.atom(static_cast<int>(i));
      if (a.element == 1 && a.isotope == 0 && a.charge == 0 && a.hydrogens == 0 && full.degree(static_cast<int>(i)) == 1) {
        const auto nb = full.neighbors(static_cast<int>(i))[0];
        if (full.atom(nb.atom).element != 1 && full.bond(nb.bond).order == BondOrder::kSingle) {
          drop[i] = true;
          full.atom(nb.atom).hydrogens += 1;
        }
      }
    }
    Molecule mol;
    std::vector<int> remap(atoms_.size(), -1);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (!drop[i]) remap[i] = mol.addAtom(full.atom(static_cast<int>(i)));
    }
    for (const auto& b : full.bonds()) {
      if (!drop[static_cast<std::size_t>(b.begin)] && !drop[static_cast<std::size_t>(b.end)]) {
        mol.addBond(remap[static_cast<std::size_t>(b.begin)], remap[static_cast<std::size_t>(b.end)], b.order);
      }
    }
    mol.perceiveRings();
    perceiveAromaticity(mol);
    return mol;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int prev_ = -1;
  std::optional<BondOrder> pending_;
  std::vector<int> branches_;
  std::map<int, std::pair<int, std::optional<BondOrder>>> open_rings_;
  std::vector<ParsedAtom> atoms_;
  std::vector<std::tuple<int, int, BondOrder>> bonds_;
};

// Pi-electron contribution of an atom to a candidate ring; -1 if the atom
// cannot take part in an aromatic system.
int piElectrons(const Molecule& mol, int index, const std::set<int>& ring) {
  const Atom& a = mol.atom(index);
  const int connections = mol.degree(index) + a.hydrogens;
  if (a.aromatic) {
    switch (a.element) {
      case 6: return a.charge < 0 ? 2 : 1;
      case 7: case 15: return (connections == 3 && a.charge == 0) ? 2 : 1;
      case 8: case 16: case 34: return 2;
      default: return 1;
    }
  }
  int doubles = 0;
  int in_system = 0;
  int exo_hetero = 0;
  for (const auto& nb : mol.neighbors(index)) {
    const BondOrder o = mol.bond(nb.bond).order;
    if (o == BondOrder::kTriple || o == BondOrder::kQuadruple) return -1;
    if (o == BondOrder::kAromatic) {
      ++in_system;
      continue;
    }
    if (o != BondOrder::kDouble) continue;
    ++doubles;
    if (ring.count(nb.atom) || mol.isRingBond(nb.bond)) {
      ++in_system;
    } else {
      const int z = mol.atom(nb.atom).element;
      if (a.element == 6 && (z == 7 || z == 8 || z == 16)) {
        ++exo_hetero;
      } else {
        return -1;
      }
    }
  }
  if (in_system > 0) return 1;
  if (exo_hetero > 0) return 0;
  if (doubles > 0) return -1;
  switch (a.element) {
    case 6:
      if (a.charge < 0) return 2;
      if (a.charge > 0) return 0;
      return -1;
    case 7:
    case 15:
      return (connections == 3 && a.charge == 0) ? 2 : -1;
    case 8:
    case 16:
    case 34:
      return (connections == 2 && a.charge == 0) ? 2 : -1;
    default:
      return -1;
  }
}

int bondCode(BondOrder o) {
  switch (o) {
    case BondOrder::kSingle: return 1;
    case BondOrder::kDouble: return 2;
    case BondOrder::kTriple: return 3;
    case BondOrder::kAromatic: return 4;
    case BondOrder::kQuadruple: return 5;
  }
  return 0;
}

std::string atomText(const Molecule& mol, int index) {
  const Atom& a = mol.atom(index);
  if (a.element == 0 && a.isotope == 0 && a.charge == 0) {
    return "*";
  }
  std::string symbol(elementSymbol(a.element));
  if (a.aromatic) {
    std::transform(symbol.begin(), symbol.end(), symbol.begin(), [](unsigned char ch) { return std::tolower(ch); });
  }
  if (a.element != 0) {
    const int implied = impliedHydrogens(mol, index);
    if (implied >= 0 && implied == a.hydrogens) {
      return symbol;
    }
  }
  std::string out = "[";
  if (a.isotope > 0) out += std::to_string(a.isotope);
  out += symbol;
  if (a.hydrogens > 0) {
    out += "H";
    if (a.hydrogens > 1) out += std::to_string(a.hydrogens);
  }
  if (a.charge != 0) {
    out += a.charge > 0 ? "+" : "-";
    if (std::abs(a.charge) > 1) out += std::to_string(std::abs(a.charge));
  }
  out += "]";
  return out;
}

std::string bondText(const Molecule& mol, int bond) {
  const Bond& b = mol.bond(bond);
  switch (b.order) {
    case BondOrder::kSingle:
      return (mol.atom(b.begin).aromatic && mol.atom(b.end).aromatic) ? "-" : "";
    case BondOrder::kDouble: return "=";
    case BondOrder::kTriple: return "#";
    case BondOrder::kQuadruple: return "$";
    case BondOrder::kAromatic: return "";
  }
  return "";
}

class Writer {
 public:
  Writer(const Molecule& mol, const std::vector<int>& ranks) : mol_(mol), ranks_(ranks) {}

  std::string component(const std::vector<int>& atoms) {
    int start = atoms.front();
    for (int a : atoms) {
      if (ranks_[static_cast<std::size_t>(a)] < ranks_[static_cast<std::size_t>(start)]) start = a;
    }
    visited_.assign(mol_.atomCount(), false);
    closure_bond_.assign(mol_.bondCount(), false);
    opens_.assign(mol_.atomCount(), {});
    closes_.assign(mol_.atomCount(), {});
    children_.assign(mol_.atomCount(), {});
    order_.assign(mol_.atomCount(), -1);
    counter_ = 0;
    plan(start, -1);
    digit_of_bond_.assign(mol_.bondCount(), -1);
    used_digits_.clear();
    std::string out;
    emit(start, out);
    return out;
  }

 private:
  std::vector<Neighbor> sortedNeighbors(int atom) const {
    std::vector<Neighbor> nbs(mol_.neighbors(atom).begin(), mol_.neighbors(atom).end());
    std::sort(nbs.begin(), nbs.end(), [&](const Neighbor& x, const Neighbor& y) {
      return ranks_[static_cast<std::size_t>(x.atom)] < ranks_[static_cast<std::size_t>(y.atom)];
    });
    return nbs;
  }

  void plan(int atom, int parent_bond) {
    visited_[static_cast<std::size_t>(atom)] = true;
    order_[static_cast<std::size_t>(atom)] = counter_++;
    for (const auto& nb : sortedNeighbors(atom)) {
      if (nb.bond == parent_bond || closure_bond_[static_cast<std::size_t>(nb.bond)]) continue;
      if (visited_[static_cast<std::size_t>(nb.atom)]) {
        // back edge to an ancestor: ring opens at the ancestor, closes here
        closure_bond_[static_cast<std::size_t>(nb.bond)] = true;
        opens_[static_cast<std::size_t>(nb.atom)].push_back(nb);
        closes_[static_cast<std::size_t>(atom)].push_back(nb);
        continue;
      }
      children_[static_cast<std::size_t>(atom)].push_back(nb);
      plan(nb.atom, nb.bond);
    }
  }

  int takeDigit() {
    int d = 1;
    while (used_digits_.count(d)) ++d;
    used_digits_.insert(d);
    return d;
  }

  static std::string digitText(int d) { return d < 10 ? std::to_string(d) : "%" + std::to_string(d); }

  void emit(int atom, std::string& out) {
    out += atomText(mol_, atom);
    auto& opens = opens_[static_cast<std::size_t>(atom)];
    auto& closes = closes_[static_cast<std::size_t>(atom)];
    // Openings: partner visited later; order by the partner's position in the output.
    std::sort(opens.begin(), opens.end(), [&](const Neighbor& x, const Neighbor& y) {
      return order_[static_cast<std::size_t>(x.atom)] < order_[static_cast<std::size_t>(y.atom)];
    });
    std::sort(closes.begin(), closes.end(), [&](const Neighbor& x, const Neighbor& y) {
      return digit_of_bond_[static_cast<std::size_t>(x.bond)] < digit_of_bond_[static_cast<std::size_t>(y.bond)];
    });
    std::vector<int> released;
    for (const auto& nb : closes) {
      const int d = digit_of_bond_[static_cast<std::size_t>(nb.bond)];
      out += digitText(d);
      released.push_back(d);
    }
    for (const auto& nb : opens) {
      const int d = takeDigit();
      digit_of_bond_[static_cast<std::size_t>(nb.bond)] = d;
      out += bondText(mol_, nb.bond) + digitText(d);
    }
    for (int d : released) used_digits_.erase(d);

    const auto& kids = children_[static_cast<std::size_t>(atom)];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const bool branch = i + 1 < kids.size();
      if (branch) out += "(";
      out += bondText(mol_, kids[i].bond);
      emit(kids[i].atom, out);
      if (branch) out += ")";
    }
  }

  const Molecule& mol_;
  const std::vector<int>& ranks_;
  std::vector<bool> visited_;
  std::vector<bool> closure_bond_;
  std::vector<std::vector<Neighbor>> opens_, closes_, children_;
  std::vector<int> order_;
  std::vector<int> digit_of_bond_;
  std::set<int> used_digits_;
  int counter_ = 0;
};

}  // namespace

Molecule parseSmiles(std::string_view smiles) { return Parser(smiles).run(); }

void perceiveAromaticity(Molecule& mol) {
  std::vector<std::vector<int>> aromatic_rings;
  for (const auto& ring : mol.rings()) {
    if (ring.size() < 5 || ring.size() > 7) continue;
    bool all_aromatic = true;
    for (int a : ring) all_aromatic = all_aromatic && mol.atom(a).aromatic;
    if (all_aromatic) continue;
    const std::set<int> members(ring.begin(), ring.end());
    int electrons = 0;
    bool ok = true;
    for (int a : ring) {
      const int e = piElectrons(mol, a, members);
      if (e < 0) {
        ok = false;
        break;
      }
      electrons += e;
    }
    if (ok && electrons % 4 == 2) aromatic_rings.push_back(ring);
  }
  for (const auto& ring : aromatic_rings) {
    for (std::size_t i = 0; i < ring.size(); ++i) {
      mol.atom(ring[i]).aromatic = true;
      const int b = mol.findBond(ring[i], ring[(i + 1) % ring.size()]);
      if (b >= 0) mol.bond(b).order = BondOrder::kAromatic;
    }
  }
}

std::vector<int> canonicalRanks(const Molecule& mol) {
  const std::size_t n = mol.atomCount();
  std::vector<int> ranks(n, 0);
  if (n == 0) return ranks;

  using Key = std::vector<long>;
  auto assign = [&](const std::vector<Key>& keys) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return keys[x] < keys[y]; });
    int rank = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0 && keys[idx[k]] != keys[idx[k - 1]]) ++rank;
      ranks[idx[k]] = rank;
    }
    return rank + 1;
  };

  std::vector<Key> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int idx = static_cast<int>(i);
    const Atom& a = mol.atom(idx);
    keys[i] = {mol.degree(idx), a.element, a.isotope, a.charge, a.hydrogens, a.aromatic ? 1 : 0,
               mol.isRingAtom(idx) ? 1 : 0};
  }
  int classes = assign(keys);

  auto refine = [&]() {
    while (true) {
      std::vector<Key> next(n);
      for (std::size_t i = 0; i < n; ++i) {
        Key k{ranks[i]};
        std::vector<long> nb;
        for (const auto& x : mol.neighbors(static_cast<int>(i))) {
          nb.push_back(static_cast<long>(ranks[static_cast<std::size_t>(x.atom)]) * 8 + bondCode(mol.bond(x.bond).order));
        }
        std::sort(nb.begin(), nb.end());
        k.insert(k.end(), nb.begin(), nb.end());
        next[i] = std::move(k);
      }
      const int updated = assign(next);
      if (updated == classes) break;
      classes = updated;
    }
  };
  refine();
  while (classes < static_cast<int>(n)) {
    // Break the lowest tied class by promoting its first member.
    std::vector<int> count(n, 0);
    for (int r : ranks) ++count[static_cast<std::size_t>(r)];
    int tied = -1;
    for (std::size_t r = 0; r < n; ++r) {
      if (count[r] > 1) {
        tied = static_cast<int>(r);
        break;
      }
    }
    std::vector<Key> next(n);
    bool promoted = false;
    for (std::size_t i = 0; i < n; ++i) {
      long v = 2L * ranks[i];
      if (!promoted && ranks[i] == tied) {
        v -= 1;
        promoted = true;
      }
      next[i] = {v};
    }
    classes = assign(next);
    refine();
  }
  return ranks;
}

std::string canonicalSmiles(const Molecule& mol) {
  if (mol.atomCount() == 0) return "";
  const std::vector<int> ranks = canonicalRanks(mol);
  Writer writer(mol, ranks);
  std::vector<std::string> parts;
  for (const auto& comp : mol.components()) {
    parts.push_back(writer.component(comp));
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ".";
    out += parts[i];
  }
  return out;
}

std::string canonicalize(std::string_view smiles) { return canonicalSmiles(parseSmiles(smiles)); }

}  // namespace ddi::chem
