#ifndef FAIRREC_METRICS_RANKING_HPP_
#define FAIRREC_METRICS_RANKING_HPP_

#include <span>
#include <vector>

#include "fairrec/core/dataset.hpp"

namespace fairrec {

inline constexpr int kDefaultMinRecCount = 5;

// Mean over items recommended to at least min_rec_count users of
// |minority share among those users - reference_minority_ratio|.
// Throws DataError when no item qualifies.
double item_ratio(const RecommendationTable& recs, std::span<const int> labels,
                  double reference_minority_ratio, int min_rec_count = kDefaultMinRecCount);

struct GroupAggregateRanking {
  int group = 0;
  std::vector<int> items;         // top-k by occurrence, index tie-break
  std::vector<int> occurrences;   // aligned with items
};

// Counts item occurrences over the recommendation lists of one group's users
// and keeps the k most frequent (fewer if the group saw fewer items).
GroupAggregateRanking aggregate_group_ranking(const RecommendationTable& recs,
                                              std::span<const int> labels, int group, int k);

// Kendall-Tau over the union of two top-k lists. A pair is concordant only
// when both items appear in both lists in the same relative order; every
// other pair counts as discordant. 1 for identical lists, -1 for disjoint.
double kendall_tau_extended(std::span<const int> list_a, std::span<const int> list_b);

// Extended Kendall-Tau between the minority and majority aggregate rankings.
double group_kendall_tau(const RecommendationTable& recs, std::span<const int> labels, int k);

}  // namespace fairrec

#endif  // FAIRREC_METRICS_RANKING_HPP_
