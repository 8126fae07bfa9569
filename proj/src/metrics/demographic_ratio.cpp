#include "fairrec/metrics/demographic_ratio.hpp"

#include "fairrec/core/error.hpp"
#include "fairrec/metrics/auc.hpp"

namespace fairrec {

DemographicRatioTable demographic_ratio_table(const InteractionDataset& train) {
  DemographicRatioTable t;
  const int n = train.num_items();
  t.count.assign(n, 0);
  t.minority_count.assign(n, 0);
  for (int u = 0; u < train.num_users(); ++u) {
    const bool minority = train.label(u) == kMinority;
    for (int i : train.items_of(u)) {
      ++t.count[i];
      if (minority) ++t.minority_count[i];
    }
  }
  t.dataset_minority_ratio = minority_ratio(train);
  t.ratio.resize(n);
  t.fallback.assign(n, false);
  for (int i = 0; i < n; ++i) {
    if (t.count[i] == 0) {
      t.ratio[i] = t.dataset_minority_ratio;
      t.fallback[i] = true;
    } else {
      t.ratio[i] = static_cast<double>(t.minority_count[i]) / static_cast<double>(t.count[i]);
    }
  }
  return t;
}

double demographic_ratio(const InteractionDataset& train, int item) {
  if (item < 0 || item >= train.num_items()) throw DataError("item index out of range");
  std::int64_t total = 0;
  std::int64_t minority = 0;
  for (int u = 0; u < train.num_users(); ++u) {
    if (train.has_interaction(u, item)) {
      ++total;
      if (train.label(u) == kMinority) ++minority;
    }
  }
  if (total == 0) return minority_ratio(train);
  return static_cast<double>(minority) / static_cast<double>(total);
}

std::vector<double> median_ratio_scores(const DemographicRatioTable& table,
                                        const RecommendationTable& recs) {
  std::vector<double> scores(recs.num_users());
  std::vector<double> buf;
  for (int u = 0; u < recs.num_users(); ++u) {
    buf.clear();
    for (int item : recs.lists[u]) buf.push_back(table.ratio.at(item));
    scores[u] = median(buf);
  }
  return scores;
}

double demographic_ratio_auc(const DemographicRatioTable& table, const RecommendationTable& recs,
                             std::span<const int> labels) {
  if (static_cast<int>(labels.size()) != recs.num_users()) {
    throw DataError("recommendations do not cover all labeled users");
  }
  const auto scores = median_ratio_scores(table, recs);
  return auc_from_scores(scores, labels);
}

double demographic_ratio_auc(const InteractionDataset& train, const RecommendationTable& recs,
                             std::span<const int> labels) {
  return demographic_ratio_auc(demographic_ratio_table(train), recs, labels);
}

}  // namespace fairrec
