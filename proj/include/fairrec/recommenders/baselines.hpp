#ifndef FAIRREC_RECOMMENDERS_BASELINES_HPP_
#define FAIRREC_RECOMMENDERS_BASELINES_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "fairrec/core/dataset.hpp"
#include "fairrec/core/random.hpp"

namespace fairrec {

// Training-set interaction counts, overall and per demographic group, with
// the derived item orderings the popularity baselines scan.
class PopularityIndex {
 public:
  explicit PopularityIndex(const InteractionDataset& train);

  std::span<const std::int64_t> counts() const { return counts_; }
  std::span<const std::int64_t> group_counts(int group) const { return group_counts_[group]; }

  // Items by descending count, ascending index on ties.
  std::span<const int> ranking() const { return ranking_; }
  std::span<const int> group_ranking(int group) const { return group_ranking_[group]; }

  // Items with at least `min_count` training interactions ordered by
  // divisiveness (demographic ratio minus minority ratio), most positive
  // first for the minority group and most negative first for the majority;
  // ties by ascending index. Comparisons are exact (integer cross products).
  std::vector<int> divisive_ranking(int group, int min_count) const;

 private:
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> group_counts_[2];
  std::vector<int> ranking_;
  std::vector<int> group_ranking_[2];
};

inline constexpr int kMaxDivisionMinCount = 5;

std::vector<int> recommend_pop(const PopularityIndex& index, std::span<const int> user_history,
                               int k);
std::vector<int> recommend_pop(const InteractionDataset& train, std::span<const int> user_history,
                               int k);

// Uniform sample of k non-history items without replacement, in draw order.
std::vector<int> recommend_rand(int num_items, std::span<const int> user_history, int k,
                                const SeedSpec& seed);

std::vector<int> recommend_dem_pop(const PopularityIndex& index, int user_group,
                                   std::span<const int> user_history, int k);
std::vector<int> recommend_dem_pop(const InteractionDataset& train, int user_group,
                                   std::span<const int> user_history, int k);

std::vector<int> recommend_max_division(std::span<const int> divisive_ranking,
                                        std::span<const int> user_history, int k);
std::vector<int> recommend_max_division(const InteractionDataset& train, int user_group,
                                        std::span<const int> user_history, int k);

enum class BaselineKind { kPop, kRand, kDemPop, kMaxDivision };

// Recommends for every user of `users` (histories and labels from that
// dataset) with statistics from `train`. RAND draws from a per-user stream
// keyed by the user's position in `user_keys` (defaults to the row index).
RecommendationTable recommend_baseline(BaselineKind kind, const InteractionDataset& train,
                                       const InteractionDataset& users, int k,
                                       const SeedSpec& seed,
                                       std::span<const int> user_keys = {});

}  // namespace fairrec

#endif  // FAIRREC_RECOMMENDERS_BASELINES_HPP_
