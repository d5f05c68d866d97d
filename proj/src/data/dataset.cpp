// SPDX-License-Identifier: Apache-2.0
#include "ddi/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "ddi/common/error.hpp"
#include "ddi/common/hashing.hpp"
#include "ddi/common/random.hpp"

namespace ddi::data {

std::size_t DdiDataset::drugIndex(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) fail(ErrorCode::kUnknownDrugReference, "unknown drug '" + id + "'");
  return it->second;
}

void DdiDataset::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < drugs.size(); ++i) index_.emplace(drugs[i].drug_id, i);
}

namespace {

std::vector<std::string> splitTabs(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    cells.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return cells;
}

//! Non-empty lines after the header with their 1-based line numbers.
std::vector<std::pair<int, std::vector<std::string>>> readTable(std::string_view text, std::size_t columns,
                                                                const std::string& what) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::pair<int, std::vector<std::string>>> rows;
  int number = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = splitTabs(line);
    if (cells.size() != columns) {
      fail(ErrorCode::kParseError, what + " line " + std::to_string(number) + ": expected " + std::to_string(columns) +
                                       " tab-separated fields, found " + std::to_string(cells.size()));
    }
    if (header) {
      header = false;
      continue;
    }
    rows.emplace_back(number, std::move(cells));
  }
  if (header) fail(ErrorCode::kParseError, what + ": missing header row");
  return rows;
}

}  // namespace

DdiDataset parseDataset(std::string_view drugs_tsv, std::string_view interactions_tsv, std::optional<int> num_events) {
  DdiDataset ds;
  std::set<std::string> seen_drugs;
  for (auto& [line, cells] : readTable(drugs_tsv, 2, "drugs")) {
    if (cells[0].empty() || cells[1].empty()) {
      fail(ErrorCode::kParseError, "drugs line " + std::to_string(line) + ": empty field");
    }
    if (!seen_drugs.insert(cells[0]).second) {
      fail(ErrorCode::kParseError, "drugs line " + std::to_string(line) + ": duplicate drug id " + cells[0]);
    }
    ds.drugs.push_back({cells[0], cells[1]});
  }
  ds.reindex();
  std::map<std::pair<std::string, std::string>, int> seen_pairs;
  int max_event = -1;
  for (auto& [line, cells] : readTable(interactions_tsv, 3, "interactions")) {
    int event = 0;
    const auto& e = cells[2];
    const auto [ptr, ec] = std::from_chars(e.data(), e.data() + e.size(), event);
    if (ec != std::errc() || ptr != e.data() + e.size() || event < 0) {
      fail(ErrorCode::kParseError, "interactions line " + std::to_string(line) + ": bad event id '" + e + "'");
    }
    for (int side = 0; side < 2; ++side) {
      if (!seen_drugs.count(cells[static_cast<std::size_t>(side)])) {
        fail(ErrorCode::kUnknownDrugReference, "interactions line " + std::to_string(line) + ": unknown drug '" +
                                                   cells[static_cast<std::size_t>(side)] + "'");
      }
    }
    const auto key = std::minmax(cells[0], cells[1]);
    if (auto it = seen_pairs.find(key); it != seen_pairs.end()) {
      ++ds.duplicates_removed;
      if (it->second != event) ++ds.conflicting_duplicates;
      continue;
    }
    seen_pairs.emplace(key, event);
    max_event = std::max(max_event, event);
    ds.interactions.push_back({cells[0], cells[1], event});
  }
  ds.num_events = max_event + 1;
  if (num_events) {
    if (*num_events < ds.num_events) {
      fail(ErrorCode::kDataError, "configured num_events " + std::to_string(*num_events) + " is below max event + 1 = " +
                                      std::to_string(ds.num_events));
    }
    ds.num_events = *num_events;
  }
  return ds;
}

DdiDataset loadDataset(const std::string& drugs_path, const std::string& interactions_path,
                       std::optional<int> num_events) {
  return parseDataset(readFile(drugs_path), readFile(interactions_path), num_events);
}

TransductiveSplit splitTransductive(const DdiDataset& dataset, std::uint64_t seed, double valid_fraction,
                                    double test_fraction) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < dataset.interactions.size(); ++i) by_class[dataset.interactions[i].event].push_back(i);
  std::vector<int> small;
  for (const auto& [event, members] : by_class)
    if (members.size() < 3) small.push_back(event);
  if (!small.empty()) {
    std::string list;
    for (int e : small) list += (list.empty() ? "" : ", ") + std::to_string(e);
    fail(ErrorCode::kClassTooSmall, "event classes with fewer than 3 samples: " + list);
  }
  TransductiveSplit split;
  split.seed = seed;
  for (auto& [event, members] : by_class) {
    Rng rng(mixSeed({seed, static_cast<std::uint64_t>(event)}));
    rng.shuffle(members.begin(), members.end());
    const double n = static_cast<double>(members.size());
    const auto n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(test_fraction * n)));
    const auto n_valid = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(valid_fraction * n)));
    split.test.insert(split.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.valid.insert(split.valid.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test),
                       members.begin() + static_cast<std::ptrdiff_t>(n_test + n_valid));
    split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test + n_valid),
                       members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.valid.begin(), split.valid.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

InductiveSplit routePairs(const DdiDataset& dataset, const std::set<std::string>& new_drugs) {
  InductiveSplit split;
  for (const auto& d : dataset.drugs) {
    (new_drugs.count(d.drug_id) ? split.new_drugs : split.old_drugs).push_back(d.drug_id);
  }
  std::sort(split.new_drugs.begin(), split.new_drugs.end());
  std::sort(split.old_drugs.begin(), split.old_drugs.end());
  for (std::size_t i = 0; i < dataset.interactions.size(); ++i) {
    const auto& it = dataset.interactions[i];
    const int fresh = static_cast<int>(new_drugs.count(it.x)) + static_cast<int>(new_drugs.count(it.y));
    (fresh == 0 ? split.train : fresh == 1 ? split.s1 : split.s2).push_back(i);
  }
  return split;
}

InductiveSplit splitInductive(const DdiDataset& dataset, double new_fraction, std::uint64_t seed,
                              double valid_fraction) {
  if (!(new_fraction > 0.0 && new_fraction < 1.0)) {
    fail(ErrorCode::kConfigError, "new_fraction must lie strictly between 0 and 1");
  }
  std::vector<std::string> ids;
  for (const auto& d : dataset.drugs) ids.push_back(d.drug_id);
  Rng rng(mixSeed({seed, 0x1d0c7}));
  rng.shuffle(ids.begin(), ids.end());
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(new_fraction * static_cast<double>(ids.size()))));
  const std::set<std::string> fresh(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(std::min(count, ids.size())));
  InductiveSplit split = routePairs(dataset, fresh);
  split.seed = seed;
  if (split.train.empty() || split.s1.empty() || split.s2.empty()) {
    fail(ErrorCode::kEmptyPartition, "inductive split has an empty bucket (train " + std::to_string(split.train.size()) +
                                         ", s1 " + std::to_string(split.s1.size()) + ", s2 " +
                                         std::to_string(split.s2.size()) + ")");
  }
  if (valid_fraction > 0) {
    std::vector<std::size_t> train = split.train;
    Rng vrng(mixSeed({seed, 0x5a11d}));
    vrng.shuffle(train.begin(), train.end());
    const auto n_valid = static_cast<std::size_t>(std::llround(valid_fraction * static_cast<double>(train.size())));
    split.valid.assign(train.begin(), train.begin() + static_cast<std::ptrdiff_t>(std::min(n_valid, train.size() - 1)));
    split.train.assign(train.begin() + static_cast<std::ptrdiff_t>(split.valid.size()), train.end());
    std::sort(split.valid.begin(), split.valid.end());
    std::sort(split.train.begin(), split.train.end());
  }
  return split;
}

nlohmann::json splitToJson(const TransductiveSplit& split) {
  return {{"mode", "transductive"}, {"seed", split.seed},          {"ratios", {0.7, 0.1, 0.2}},
          {"train", split.train},   {"valid", split.valid},        {"test", split.test}};
}

nlohmann::json splitToJson(const InductiveSplit& split) {
  return {{"mode", "inductive"}, {"seed", split.seed}, {"train", split.train}, {"valid", split.valid},
          {"s1", split.s1},      {"s2", split.s2},     {"new_drugs", split.new_drugs}};
}

std::vector<std::size_t> bucketFromJson(const nlohmann::json& manifest, const std::string& bucket) {
  if (!manifest.contains(bucket) || !manifest.at(bucket).is_array()) {
    fail(ErrorCode::kDataError, "split manifest has no bucket '" + bucket + "'");
  }
  return manifest.at(bucket).get<std::vector<std::size_t>>();
}

}  // namespace ddi::data
