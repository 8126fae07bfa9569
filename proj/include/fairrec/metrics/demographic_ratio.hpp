#ifndef FAIRREC_METRICS_DEMOGRAPHIC_RATIO_HPP_
#define FAIRREC_METRICS_DEMOGRAPHIC_RATIO_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "fairrec/core/dataset.hpp"

namespace fairrec {

// Per-item share of interactions made by minority users in a reference
// (training) dataset. Items without interactions carry the dataset minority
// ratio and are flagged.
struct DemographicRatioTable {
  std::vector<double> ratio;
  std::vector<std::int64_t> count;
  std::vector<std::int64_t> minority_count;
  std::vector<bool> fallback;
  double dataset_minority_ratio = 0.0;

  int num_items() const { return static_cast<int>(ratio.size()); }
};

DemographicRatioTable demographic_ratio_table(const InteractionDataset& train);

// Ratio of one item; same fallback rule as the table.
double demographic_ratio(const InteractionDataset& train, int item);

// Per-user predictor: median demographic ratio of the recommended items.
std::vector<double> median_ratio_scores(const DemographicRatioTable& table,
                                        const RecommendationTable& recs);

// AUC of the median-ratio predictor, minority as positive class, unfolded.
double demographic_ratio_auc(const DemographicRatioTable& table, const RecommendationTable& recs,
                             std::span<const int> labels);
double demographic_ratio_auc(const InteractionDataset& train, const RecommendationTable& recs,
                             std::span<const int> labels);

}  // namespace fairrec

#endif  // FAIRREC_METRICS_DEMOGRAPHIC_RATIO_HPP_
