// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "ddi/chem/tokenizer.hpp"

namespace ddi::data {

struct Interaction {
  std::string x;
  std::string y;
  int event = 0;
};

struct DdiDataset {
  std::vector<chem::DrugRecord> drugs;
  std::vector<Interaction> interactions;
  int num_events = 0;
  int duplicates_removed = 0;  // mirrored or repeated pairs dropped at load
  int conflicting_duplicates = 0;  // dropped duplicates whose event differed

  //! Index into drugs; throws kUnknownDrugReference.
  std::size_t drugIndex(const std::string& id) const;
  const chem::DrugRecord& drug(const std::string& id) const { return drugs[drugIndex(id)]; }
  void reindex();

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

//! Parses `drug_id<TAB>smiles` and `drug_id_x<TAB>drug_id_y<TAB>event_id`
//! tables, each with a header row. Pairs are deduplicated as unordered pairs,
//! keeping the first occurrence. num_events defaults to max(event) + 1.
DdiDataset parseDataset(std::string_view drugs_tsv, std::string_view interactions_tsv,
                        std::optional<int> num_events = std::nullopt);
DdiDataset loadDataset(const std::string& drugs_path, const std::string& interactions_path,
                       std::optional<int> num_events = std::nullopt);

struct TransductiveSplit {
  std::uint64_t seed = 0;
  std::vector<std::size_t> train, valid, test;  // interaction indices, ascending
};

//! Per event class: seeded shuffle, then test = max(1, round(0.2 n)),
//! valid = max(1, round(0.1 n)), train = rest. Throws kClassTooSmall for
//! classes with fewer than 3 samples.
TransductiveSplit splitTransductive(const DdiDataset& dataset, std::uint64_t seed, double valid_fraction = 0.1,
                                    double test_fraction = 0.2);

struct InductiveSplit {
  std::uint64_t seed = 0;
  std::vector<std::size_t> train, valid, s1, s2;
  std::vector<std::string> new_drugs, old_drugs;  // sorted
};

//! Routes pairs by membership: both old -> train, exactly one new -> s1,
//! both new -> s2. Drugs not listed as new are old.
InductiveSplit routePairs(const DdiDataset& dataset, const std::set<std::string>& new_drugs);

//! Seeded drug shuffle, first max(1, round(new_fraction * drugs)) become new;
//! `valid_fraction` of train pairs are moved to valid. Throws kEmptyPartition
//! when train, s1 or s2 is empty.
InductiveSplit splitInductive(const DdiDataset& dataset, double new_fraction, std::uint64_t seed,
                              double valid_fraction = 0.1);

nlohmann::json splitToJson(const TransductiveSplit& split);
nlohmann::json splitToJson(const InductiveSplit& split);

//! Interaction indices of a named bucket ("train", "valid", "test", "s1", "s2")
//! from a split manifest. Throws kDataError for an unknown bucket.
std::vector<std::size_t> bucketFromJson(const nlohmann::json& manifest, const std::string& bucket);

}  // namespace ddi::data
