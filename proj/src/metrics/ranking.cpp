#include "fairrec/metrics/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "fairrec/core/error.hpp"

namespace fairrec {

double item_ratio(const RecommendationTable& recs, std::span<const int> labels,
                  double reference_minority_ratio, int min_rec_count) {
  if (static_cast<int>(labels.size()) != recs.num_users()) {
    throw DataError("item_ratio: labels do not match recommendation table");
  }
  std::unordered_map<int, std::pair<int, int>> counts;  // item -> (total, minority)
  for (int u = 0; u < recs.num_users(); ++u) {
    for (int item : recs.lists[u]) {
      auto& c = counts[item];
      ++c.first;
      if (labels[u] == kMinority) ++c.second;
    }
  }
  // Sum in item order so the result does not depend on hash iteration order.
  std::vector<std::pair<int, std::pair<int, int>>> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  int qualifying = 0;
  for (const auto& [item, c] : sorted) {
    if (c.first < min_rec_count) continue;
    const double share = static_cast<double>(c.second) / c.first;
    sum += std::abs(share - reference_minority_ratio);
    ++qualifying;
  }
  if (qualifying == 0) {
    throw DataError("item_ratio: no item was recommended to at least " +
                    std::to_string(min_rec_count) + " users");
  }
  return sum / qualifying;
}

GroupAggregateRanking aggregate_group_ranking(const RecommendationTable& recs,
                                              std::span<const int> labels, int group, int k) {
  std::unordered_map<int, int> counts;
  int members = 0;
  for (int u = 0; u < recs.num_users(); ++u) {
    if (labels[u] != group) continue;
    ++members;
    for (int item : recs.lists[u]) ++counts[item];
  }
  if (members == 0) throw DataError("aggregate_group_ranking: group " + std::to_string(group) +
                                    " has no users");
  std::vector<std::pair<int, int>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second > b.second || (a.second == b.second && a.first < b.first);
  });
  if (static_cast<int>(ranked.size()) > k) ranked.resize(k);
  GroupAggregateRanking out;
  out.group = group;
  for (auto [item, n] : ranked) {
    out.items.push_back(item);
    out.occurrences.push_back(n);
  }
  return out;
}

double kendall_tau_extended(std::span<const int> list_a, std::span<const int> list_b) {
  if (list_a.empty() || list_b.empty()) throw DataError("kendall_tau_extended: empty list");
  std::unordered_map<int, int> pos_a;
  std::unordered_map<int, int> pos_b;
  for (int r = 0; r < static_cast<int>(list_a.size()); ++r) {
    if (!pos_a.emplace(list_a[r], r).second) throw DataError("kendall_tau_extended: duplicate item in first list");
  }
  for (int r = 0; r < static_cast<int>(list_b.size()); ++r) {
    if (!pos_b.emplace(list_b[r], r).second) throw DataError("kendall_tau_extended: duplicate item in second list");
  }
  std::vector<int> items(list_a.begin(), list_a.end());
  for (int item : list_b) {
    if (!pos_a.contains(item)) items.push_back(item);
  }
  const auto n = static_cast<long long>(items.size());
  if (n < 2) return 1.0;  // a single shared item: identical lists
  long long concordant = 0;
  for (long long x = 0; x < n; ++x) {
    auto ax = pos_a.find(items[x]);
    auto bx = pos_b.find(items[x]);
    if (ax == pos_a.end() || bx == pos_b.end()) continue;
    for (long long y = x + 1; y < n; ++y) {
      auto ay = pos_a.find(items[y]);
      auto by = pos_b.find(items[y]);
      if (ay == pos_a.end() || by == pos_b.end()) continue;
      if ((ax->second < ay->second) == (bx->second < by->second)) ++concordant;
    }
  }
  const long long pairs = n * (n - 1) / 2;
  const long long discordant = pairs - concordant;
  return static_cast<double>(concordant - discordant) / static_cast<double>(pairs);
}

double group_kendall_tau(const RecommendationTable& recs, std::span<const int> labels, int k) {
  const auto minority = aggregate_group_ranking(recs, labels, kMinority, k);
  const auto majority = aggregate_group_ranking(recs, labels, kMajority, k);
  return kendall_tau_extended(minority.items, majority.items);
}

}  // namespace fairrec
