#ifndef FAIRREC_CORE_SPLIT_HPP_
#define FAIRREC_CORE_SPLIT_HPP_

#include <vector>

#include "fairrec/core/dataset.hpp"
#include "fairrec/core/random.hpp"

namespace fairrec {

// User-disjoint train/test partition sharing the item index space.
// train_users[j] is the parent index of train user j (likewise for test).
struct DatasetSplit {
  InteractionDataset train;
  InteractionDataset test;
  double test_ratio = 0.0;
  std::vector<int> train_users;
  std::vector<int> test_users;
};

// Stratified by demographic group: each group contributes
// round(test_ratio * group size) users to the test side, clamped so that
// both sides keep at least one user of each group.
DatasetSplit split_by_user(const InteractionDataset& dataset, double test_ratio,
                           const SeedSpec& seed);

}  // namespace fairrec

#endif  // FAIRREC_CORE_SPLIT_HPP_
