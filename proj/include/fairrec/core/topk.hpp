#ifndef FAIRREC_CORE_TOPK_HPP_
#define FAIRREC_CORE_TOPK_HPP_

#include <algorithm>
#include <span>
#include <vector>

#include "fairrec/core/error.hpp"

namespace fairrec {

// The k eligible indices with the largest score, descending, ties broken by
// ascending index. `excluded` must be sorted. Throws DataError if fewer than
// k indices are eligible.
template <typename Score>
std::vector<int> select_top_k(std::span<const Score> scores, std::span<const int> excluded, int k) {
  std::vector<int> eligible;
  eligible.reserve(scores.size());
  auto ex = excluded.begin();
  for (int i = 0; i < static_cast<int>(scores.size()); ++i) {
    while (ex != excluded.end() && *ex < i) ++ex;
    if (ex != excluded.end() && *ex == i) continue;
    eligible.push_back(i);
  }
  if (static_cast<int>(eligible.size()) < k) {
    throw DataError("only " + std::to_string(eligible.size()) + " eligible items for top-" +
                    std::to_string(k));
  }
  auto better = [&](int a, int b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  std::partial_sort(eligible.begin(), eligible.begin() + k, eligible.end(), better);
  eligible.resize(k);
  return eligible;
}

// First k entries of a precomputed ranking that are not in `excluded`
// (sorted).
inline std::vector<int> first_k_not_in(std::span<const int> ranking, std::span<const int> excluded,
                                       int k) {
  std::vector<int> out;
  out.reserve(k);
  for (int item : ranking) {
    if (static_cast<int>(out.size()) == k) break;
    if (!std::binary_search(excluded.begin(), excluded.end(), item)) out.push_back(item);
  }
  if (static_cast<int>(out.size()) < k) {
    throw DataError("only " + std::to_string(out.size()) + " eligible items for top-" +
                    std::to_string(k));
  }
  return out;
}

}  // namespace fairrec

#endif  // FAIRREC_CORE_TOPK_HPP_
