// SPDX-License-Identifier: Apache-2.0
#include "ddi/chem/tokenizer.hpp"

#include <algorithm>
#include "json.hpp"

#include "ddi/chem/brics.hpp"
#include "ddi/chem/smiles.hpp"
#include "ddi/common/error.hpp"
#include "ddi/common/hashing.hpp"

namespace ddi::chem {

std::vector<std::string> decompose(std::string_view smiles) { return bricsFragments(parseSmiles(smiles)); }

MotifVocabulary::MotifVocabulary() : tokens_{"<pad>", "<unk>"} {}

MotifVocabulary MotifVocabulary::build(std::span<const DrugRecord> drugs) {
  MotifVocabulary vocab;
  for (const auto& drug : drugs) {
    std::vector<std::string> fragments;
    try {
      fragments = decompose(drug.smiles);
    } catch (const Error& e) {
      fail(e.code(), "drug " + drug.drug_id + ": " + e.what());
    }
    for (const auto& f : fragments) {
      vocab.add(f);
    }
  }
  return vocab;
}

int MotifVocabulary::add(const std::string& fragment) {
  if (auto it = ids_.find(fragment); it != ids_.end()) {
    return it->second;
  }
  const int id = static_cast<int>(tokens_.size());
  tokens_.push_back(fragment);
  ids_.emplace(fragment, id);
  return id;
}

std::optional<int> MotifVocabulary::find(std::string_view fragment) const {
  if (auto it = ids_.find(std::string(fragment)); it != ids_.end()) {
    return it->second;
  }
  return std::nullopt;
}

std::string MotifVocabulary::toJson() const {
  nlohmann::ordered_json doc;
  doc["pad_id"] = kPadId;
  doc["unk_id"] = kUnkId;
  nlohmann::ordered_json motifs = nlohmann::ordered_json::object();
  for (std::size_t id = 2; id < tokens_.size(); ++id) {
    motifs[tokens_[id]] = id;
  }
  doc["motifs"] = std::move(motifs);
  return doc.dump(1) + "\n";
}

MotifVocabulary MotifVocabulary::fromJson(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, std::string("vocabulary JSON: ") + e.what());
  }
  if (doc.value("pad_id", -1) != kPadId || doc.value("unk_id", -1) != kUnkId || !doc.contains("motifs")) {
    fail(ErrorCode::kParseError, "vocabulary JSON must have pad_id 0, unk_id 1 and a motifs object");
  }
  std::vector<std::pair<int, std::string>> entries;
  for (const auto& [fragment, id] : doc["motifs"].items()) {
    entries.emplace_back(id.get<int>(), fragment);
  }
  std::sort(entries.begin(), entries.end());
  MotifVocabulary vocab;
  for (const auto& [id, fragment] : entries) {
    if (id != static_cast<int>(vocab.size())) {
      fail(ErrorCode::kParseError, "vocabulary ids are not contiguous at id " + std::to_string(id));
    }
    vocab.add(fragment);
  }
  return vocab;
}

std::string MotifVocabulary::hash() const { return sha256Hex(toJson()); }

bool PairSequence::anyUnmasked() const {
  return std::any_of(key_mask.begin(), key_mask.end(), [](bool b) { return b; });
}

MotifSequence encodeDrug(std::string_view drug_id, std::string_view smiles, const MotifVocabulary& vocab, int length) {
  require(length >= 1, ErrorCode::kConfigError, "sequence length must be >= 1");
  const auto fragments = decompose(smiles);
  MotifSequence seq;
  seq.drug_id = std::string(drug_id);
  seq.raw_length = static_cast<int>(fragments.size());
  seq.token_ids.assign(static_cast<std::size_t>(length), MotifVocabulary::kPadId);
  const std::size_t kept = std::min(fragments.size(), static_cast<std::size_t>(length));
  for (std::size_t i = 0; i < kept; ++i) {
    seq.token_ids[i] = vocab.idOf(fragments[i]);
  }
  return seq;
}

PairSequence joinPair(const MotifSequence& x, const MotifSequence& y) {
  if (x.token_ids.size() != y.token_ids.size()) {
    fail(ErrorCode::kLengthMismatch, "cannot join sequences of length " + std::to_string(x.token_ids.size()) +
                                         " and " + std::to_string(y.token_ids.size()));
  }
  const std::size_t len = x.token_ids.size();
  PairSequence pair;
  pair.token_ids.reserve(2 * len);
  pair.token_ids.insert(pair.token_ids.end(), x.token_ids.begin(), x.token_ids.end());
  pair.token_ids.insert(pair.token_ids.end(), y.token_ids.begin(), y.token_ids.end());
  pair.segment_ids.assign(2 * len, 0);
  std::fill(pair.segment_ids.begin() + static_cast<std::ptrdiff_t>(len), pair.segment_ids.end(), 1);
  pair.key_mask.resize(2 * len);
  for (std::size_t i = 0; i < 2 * len; ++i) {
    pair.key_mask[i] = pair.token_ids[i] != MotifVocabulary::kPadId;
  }
  return pair;
}

}  // namespace ddi::chem
