#ifndef FAIRREC_METRICS_AUC_HPP_
#define FAIRREC_METRICS_AUC_HPP_

#include <span>
#include <vector>

namespace fairrec {

// Per-user score with binary label (1 = minority = positive class).
struct ScoredLabels {
  std::vector<double> scores;
  std::vector<int> labels;
};

// Mann-Whitney AUC: the fraction of (positive, negative) pairs in which the
// positive scores higher, ties counting one half. Unfolded: values below 0.5
// are returned as is. Throws DataError unless both classes are present.
double auc_from_scores(std::span<const double> scores, std::span<const int> labels);
double auc_from_scores(const ScoredLabels& data);

// max(a, 1 - a)
inline double fold_auc(double a) { return a < 0.5 ? 1.0 - a : a; }

// Median with the mean of the two central values for even lengths.
double median(std::vector<double> values);

}  // namespace fairrec

#endif  // FAIRREC_METRICS_AUC_HPP_
