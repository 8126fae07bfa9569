#include "fairrec/core/split.hpp"

#include <algorithm>
#include <cmath>

#include "fairrec/core/error.hpp"

namespace fairrec {

DatasetSplit split_by_user(const InteractionDataset& dataset, double test_ratio,
                           const SeedSpec& seed) {
  if (!(test_ratio > 0.0 && test_ratio < 1.0)) {
    throw ConfigError("test_ratio must lie in (0, 1), got " + std::to_string(test_ratio));
  }
  std::vector<bool> is_test(dataset.num_users(), false);
  for (int group : {kMajority, kMinority}) {
    std::vector<int> members;
    for (int u = 0; u < dataset.num_users(); ++u) {
      if (dataset.label(u) == group) members.push_back(u);
    }
    const int n = static_cast<int>(members.size());
    if (n < 2) {
      throw DataError(std::string("too few users in ") +
                      (group == kMinority ? "minority" : "majority") + " group (" +
                      std::to_string(n) + ") to split");
    }
    int n_test = static_cast<int>(std::lround(test_ratio * n));
    n_test = std::clamp(n_test, 1, n - 1);
    Rng rng = seed.derive("split").derive(static_cast<std::uint64_t>(group)).engine();
    std::shuffle(members.begin(), members.end(), rng);
    for (int j = 0; j < n_test; ++j) is_test[members[j]] = true;
  }

  DatasetSplit split;
  split.test_ratio = test_ratio;
  for (int u = 0; u < dataset.num_users(); ++u) {
    (is_test[u] ? split.test_users : split.train_users).push_back(u);
  }
  split.train = dataset.subset(split.train_users);
  split.test = dataset.subset(split.test_users);
  return split;
}

}  // namespace fairrec
