#include "fairrec/metrics/auc.hpp"

#include <algorithm>
#include <numeric>

#include "fairrec/core/error.hpp"

namespace fairrec {

double auc_from_scores(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("auc: score/label length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Rank sum of the positives with mid-ranks for ties. Twice the rank is an
  // integer, so the accumulation is exact.
  double twice_rank_sum = 0.0;
  double n_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double twice_mid_rank = static_cast<double>(i + 1 + j + 1);
    for (std::size_t t = i; t <= j; ++t) {
      if (labels[order[t]] == 1) {
        twice_rank_sum += twice_mid_rank;
        n_pos += 1.0;
      }
    }
    i = j + 1;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) throw DataError("auc requires both classes to be present");
  // Twice the Mann-Whitney U statistic.
  const double twice_u = twice_rank_sum - n_pos * (n_pos + 1.0);
  return twice_u / (2.0 * n_pos * n_neg);
}

double auc_from_scores(const ScoredLabels& data) {
  return auc_from_scores(std::span<const double>(data.scores), std::span<const int>(data.labels));
}

double median(std::vector<double> values) {
  if (values.empty()) throw DataError("median of an empty list");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace fairrec
