#include "fairrec/recommenders/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "fairrec/core/error.hpp"
#include "fairrec/core/topk.hpp"

namespace fairrec {

namespace {

std::vector<int> rank_by_count(std::span<const std::int64_t> counts) {
  std::vector<int> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return counts[a] > counts[b]; });
  return order;
}

}  // namespace

PopularityIndex::PopularityIndex(const InteractionDataset& train) {
  const int n = train.num_items();
  counts_.assign(n, 0);
  group_counts_[0].assign(n, 0);
  group_counts_[1].assign(n, 0);
  for (int u = 0; u < train.num_users(); ++u) {
    auto& g = group_counts_[train.label(u)];
    for (int i : train.items_of(u)) {
      ++counts_[i];
      ++g[i];
    }
  }
  ranking_ = rank_by_count(counts_);
  group_ranking_[0] = rank_by_count(group_counts_[0]);
  group_ranking_[1] = rank_by_count(group_counts_[1]);
}

std::vector<int> PopularityIndex::divisive_ranking(int group, int min_count) const {
  std::vector<int> items;
  for (int i = 0; i < static_cast<int>(counts_.size()); ++i) {
    if (counts_[i] >= min_count) items.push_back(i);
  }
  const auto& minority = group_counts_[kMinority];
  // ratio(a) > ratio(b)  <=>  m_a * n_b > m_b * n_a
  auto ratio_greater = [&](int a, int b) {
    return static_cast<__int128>(minority[a]) * counts_[b] >
           static_cast<__int128>(minority[b]) * counts_[a];
  };
  if (group == kMinority) {
    std::stable_sort(items.begin(), items.end(), ratio_greater);
  } else {
    std::stable_sort(items.begin(), items.end(),
                     [&](int a, int b) { return ratio_greater(b, a); });
  }
  return items;
}

std::vector<int> recommend_pop(const PopularityIndex& index, std::span<const int> user_history,
                               int k) {
  return first_k_not_in(index.ranking(), user_history, k);
}

std::vector<int> recommend_pop(const InteractionDataset& train, std::span<const int> user_history,
                               int k) {
  return recommend_pop(PopularityIndex(train), user_history, k);
}

std::vector<int> recommend_rand(int num_items, std::span<const int> user_history, int k,
                                const SeedSpec& seed) {
  std::vector<int> eligible;
  eligible.reserve(num_items);
  for (int i = 0; i < num_items; ++i) {
    if (!std::binary_search(user_history.begin(), user_history.end(), i)) eligible.push_back(i);
  }
  if (static_cast<int>(eligible.size()) < k) {
    throw DataError("only " + std::to_string(eligible.size()) + " eligible items for top-" +
                    std::to_string(k));
  }
  Rng rng = seed.engine();
  for (int j = 0; j < k; ++j) {
    std::uniform_int_distribution<std::size_t> pick(j, eligible.size() - 1);
    std::swap(eligible[j], eligible[pick(rng)]);
  }
  eligible.resize(k);
  return eligible;
}

std::vector<int> recommend_dem_pop(const PopularityIndex& index, int user_group,
                                   std::span<const int> user_history, int k) {
  return first_k_not_in(index.group_ranking(user_group), user_history, k);
}

std::vector<int> recommend_dem_pop(const InteractionDataset& train, int user_group,
                                   std::span<const int> user_history, int k) {
  return recommend_dem_pop(PopularityIndex(train), user_group, user_history, k);
}

std::vector<int> recommend_max_division(std::span<const int> divisive_ranking,
                                        std::span<const int> user_history, int k) {
  return first_k_not_in(divisive_ranking, user_history, k);
}

std::vector<int> recommend_max_division(const InteractionDataset& train, int user_group,
                                        std::span<const int> user_history, int k) {
  const auto ranking = PopularityIndex(train).divisive_ranking(user_group, kMaxDivisionMinCount);
  return recommend_max_division(ranking, user_history, k);
}

RecommendationTable recommend_baseline(BaselineKind kind, const InteractionDataset& train,
                                       const InteractionDataset& users, int k,
                                       const SeedSpec& seed, std::span<const int> user_keys) {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (!user_keys.empty() && static_cast<int>(user_keys.size()) != users.num_users()) {
    throw DataError("user key count does not match user count");
  }
  const PopularityIndex index(train);
  std::vector<int> divisive[2];
  if (kind == BaselineKind::kMaxDivision) {
    divisive[kMajority] = index.divisive_ranking(kMajority, kMaxDivisionMinCount);
    divisive[kMinority] = index.divisive_ranking(kMinority, kMaxDivisionMinCount);
  }
  const SeedSpec rand_seed = seed.derive("rand");
  RecommendationTable table;
  table.k = k;
  table.lists.resize(users.num_users());
  for (int u = 0; u < users.num_users(); ++u) {
    const auto history = users.items_of(u);
    const int group = users.label(u);
    switch (kind) {
      case BaselineKind::kPop:
        table.lists[u] = recommend_pop(index, history, k);
        break;
      case BaselineKind::kRand: {
        const auto key = static_cast<std::uint64_t>(user_keys.empty() ? u : user_keys[u]);
        table.lists[u] = recommend_rand(train.num_items(), history, k, rand_seed.derive(key));
        break;
      }
      case BaselineKind::kDemPop:
        table.lists[u] = recommend_dem_pop(index, group, history, k);
        break;
      case BaselineKind::kMaxDivision:
        table.lists[u] = recommend_max_division(divisive[group], history, k);
        break;
    }
  }
  return table;
}

}  // namespace fairrec
