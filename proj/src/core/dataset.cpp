#include "fairrec/core/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "fairrec/core/error.hpp"

namespace fairrec {

std::string to_string(Provenance p) {
  return p == Provenance::kSynthetic ? "synthetic" : "ingested";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "synthetic") return Provenance::kSynthetic;
  if (s == "ingested") return Provenance::kIngested;
  throw ConfigError("unknown provenance '" + s + "'");
}

void canonicalize_labels(std::vector<int>& labels) {
  const auto ones = std::count(labels.begin(), labels.end(), 1);
  const auto zeros = static_cast<std::ptrdiff_t>(labels.size()) - ones;
  if (ones > zeros) {
    for (int& l : labels) l = 1 - l;
  }
}

InteractionDataset InteractionDataset::from_histories(int num_items,
                                                      std::vector<std::vector<int>> histories,
                                                      std::vector<int> labels,
                                                      Provenance provenance) {
  const int num_users = static_cast<int>(histories.size());
  if (num_users == 0) throw DataError("dataset has no users");
  if (num_items <= 0) throw DataError("dataset has no items");
  if (static_cast<int>(labels.size()) != num_users) {
    throw DataError("label count " + std::to_string(labels.size()) +
                    " does not match user count " + std::to_string(num_users));
  }
  for (int u = 0; u < num_users; ++u) {
    if (labels[u] != 0 && labels[u] != 1) {
      throw DataError("user " + std::to_string(u) + " has non-binary label " +
                      std::to_string(labels[u]));
    }
  }
  canonicalize_labels(labels);

  InteractionDataset d;
  d.num_items_ = num_items;
  d.provenance_ = provenance;
  d.labels_ = std::move(labels);
  d.offsets_.assign(1, 0);
  d.offsets_.reserve(num_users + 1);
  for (int u = 0; u < num_users; ++u) {
    auto& h = histories[u];
    if (h.empty()) throw DataError("user " + std::to_string(u) + " has no interactions");
    std::sort(h.begin(), h.end());
    if (std::adjacent_find(h.begin(), h.end()) != h.end()) {
      throw DataError("duplicate interaction for user " + std::to_string(u));
    }
    if (h.front() < 0 || h.back() >= num_items) {
      throw DataError("item index out of range for user " + std::to_string(u));
    }
    d.items_.insert(d.items_.end(), h.begin(), h.end());
    d.offsets_.push_back(static_cast<std::int64_t>(d.items_.size()));
  }
  return d;
}

InteractionDataset InteractionDataset::from_pairs(int num_users, int num_items,
                                                  std::span<const std::pair<int, int>> pairs,
                                                  std::vector<int> labels,
                                                  Provenance provenance) {
  if (pairs.empty()) throw DataError("no interactions");
  std::vector<std::vector<int>> histories(num_users);
  for (const auto& [u, i] : pairs) {
    if (u < 0 || u >= num_users) {
      throw DataError("user index " + std::to_string(u) + " out of range");
    }
    histories[u].push_back(i);
  }
  return from_histories(num_items, std::move(histories), std::move(labels), provenance);
}

InteractionDataset InteractionDataset::subset(std::span<const int> users) const {
  InteractionDataset d;
  d.num_items_ = num_items_;
  d.provenance_ = provenance_;
  d.offsets_.assign(1, 0);
  for (int u : users) {
    auto h = items_of(u);
    d.items_.insert(d.items_.end(), h.begin(), h.end());
    d.offsets_.push_back(static_cast<std::int64_t>(d.items_.size()));
    d.labels_.push_back(labels_[u]);
  }
  return d;
}

InteractionDataset InteractionDataset::with_labels(std::vector<int> labels) const {
  if (static_cast<int>(labels.size()) != num_users()) {
    throw DataError("label count does not match user count");
  }
  InteractionDataset d = *this;
  d.labels_ = std::move(labels);
  return d;
}

bool InteractionDataset::has_interaction(int user, int item) const {
  auto h = items_of(user);
  return std::binary_search(h.begin(), h.end(), item);
}

int InteractionDataset::group_size(int group) const {
  return static_cast<int>(std::count(labels_.begin(), labels_.end(), group));
}

std::vector<std::int64_t> InteractionDataset::item_counts() const {
  std::vector<std::int64_t> counts(num_items_, 0);
  for (int i : items_) ++counts[i];
  return counts;
}

double minority_ratio(const InteractionDataset& dataset) {
  if (dataset.num_users() == 0) throw DataError("minority_ratio of an empty dataset");
  return static_cast<double>(dataset.group_size(kMinority)) / dataset.num_users();
}

void validate_recommendations(const RecommendationTable& table,
                              const InteractionDataset& histories) {
  if (table.num_users() != histories.num_users()) {
    throw DataError("recommendation table covers " + std::to_string(table.num_users()) +
                    " users, expected " + std::to_string(histories.num_users()));
  }
  for (int u = 0; u < table.num_users(); ++u) {
    const auto& list = table.lists[u];
    if (static_cast<int>(list.size()) != table.k) {
      throw DataError("user " + std::to_string(u) + " has " + std::to_string(list.size()) +
                      " recommendations, expected " + std::to_string(table.k));
    }
    std::unordered_set<int> seen;
    for (int item : list) {
      if (!seen.insert(item).second) {
        throw DataError("user " + std::to_string(u) + " has duplicate recommendation");
      }
      if (histories.has_interaction(u, item)) {
        throw DataError("user " + std::to_string(u) + " was recommended known item " +
                        std::to_string(item));
      }
    }
  }
}

}  // namespace fairrec
