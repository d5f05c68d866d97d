// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ddi::chem {

struct DrugRecord {
  std::string drug_id;
  std::string smiles;
};

//! Ordered list of unique canonical BRICS fragments for a SMILES string.
std::vector<std::string> decompose(std::string_view smiles);

//! Bijection between canonical motif SMILES and integer ids. Ids 0 and 1 are
//! reserved for padding and unknown motifs; motifs take ids from 2 upward in
//! first-encounter order.
class MotifVocabulary {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kUnkId = 1;

  MotifVocabulary();

  //! Decomposes every drug in order and registers each new fragment.
  static MotifVocabulary build(std::span<const DrugRecord> drugs);

  //! Registers a fragment if absent and returns its id.
  int add(const std::string& fragment);

  std::optional<int> find(std::string_view fragment) const;
  int idOf(std::string_view fragment) const { return find(fragment).value_or(kUnkId); }

  //! Fragment text for a motif id; "<pad>" and "<unk>" for the specials.
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }

  std::size_t size() const noexcept { return tokens_.size(); }

  //! {"pad_id":0,"unk_id":1,"motifs":{...}} with motifs written in id order.
  std::string toJson() const;
  static MotifVocabulary fromJson(std::string_view text);

  //! SHA-256 of toJson(); identifies the vocabulary inside checkpoints.
  std::string hash() const;

  bool operator==(const MotifVocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

struct MotifSequence {
  std::string drug_id;
  std::vector<int> token_ids;  // exactly L entries
  int raw_length = 0;          // motif count before padding or truncation
};

struct PairSequence {
  std::vector<int> token_ids;    // 2L entries: first drug then second drug
  std::vector<int> segment_ids;  // 0 for the first L slots, 1 for the rest
  std::vector<bool> key_mask;    // true where the token is not padding

  std::size_t length() const noexcept { return token_ids.size(); }
  bool anyUnmasked() const;
};

//! Maps fragments to ids (unknown -> kUnkId), keeps the first L and pads the rest.
MotifSequence encodeDrug(std::string_view drug_id, std::string_view smiles, const MotifVocabulary& vocab, int length);

//! Ordered concatenation of two per-drug sequences of equal length.
PairSequence joinPair(const MotifSequence& x, const MotifSequence& y);

}  // namespace ddi::chem
