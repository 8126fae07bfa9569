#ifndef FAIRREC_CORE_DATASET_HPP_
#define FAIRREC_CORE_DATASET_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fairrec {

enum class Provenance { kSynthetic, kIngested };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

// Binary group labels. kMinority is always the (weakly) smaller group once a
// dataset is canonicalized.
inline constexpr int kMajority = 0;
inline constexpr int kMinority = 1;

// Users, items, their implicit interactions and one binary demographic label
// per user. Immutable after construction.
//
// Invariants: (user, item) pairs are unique and in bounds; each user has at
// least one interaction; label 1 marks the smaller group.
class InteractionDataset {
 public:
  InteractionDataset() = default;

  // Validates and canonicalizes labels. Duplicate pairs, out-of-range
  // indices, users without interactions and labels outside {0,1} throw
  // DataError.
  static InteractionDataset from_pairs(int num_users, int num_items,
                                       std::span<const std::pair<int, int>> pairs,
                                       std::vector<int> labels,
                                       Provenance provenance);

  // Same, but from per-user item lists (need not be sorted).
  static InteractionDataset from_histories(int num_items,
                                           std::vector<std::vector<int>> histories,
                                           std::vector<int> labels,
                                           Provenance provenance);

  // The given users, renumbered 0..n-1 in the given order. Labels are carried
  // over as-is (no re-canonicalization) so a subset agrees with its parent on
  // which group is the minority.
  InteractionDataset subset(std::span<const int> users) const;

  // Labels replaced verbatim; used to probe label dependence of models.
  InteractionDataset with_labels(std::vector<int> labels) const;

  int num_users() const { return static_cast<int>(offsets_.size()) - 1; }
  int num_items() const { return num_items_; }
  std::int64_t num_interactions() const { return static_cast<std::int64_t>(items_.size()); }

  // Sorted item indices of one user.
  std::span<const int> items_of(int user) const {
    return {items_.data() + offsets_[user],
            static_cast<std::size_t>(offsets_[user + 1] - offsets_[user])};
  }
  bool has_interaction(int user, int item) const;

  int label(int user) const { return labels_[user]; }
  std::span<const int> labels() const { return labels_; }
  int group_size(int group) const;
  Provenance provenance() const { return provenance_; }

  // Per-item interaction counts over all users.
  std::vector<std::int64_t> item_counts() const;

  friend bool operator==(const InteractionDataset&, const InteractionDataset&) = default;

 private:
  int num_items_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<int> items_;
  std::vector<int> labels_;
  Provenance provenance_ = Provenance::kSynthetic;
};

// |U_minority| / |U|. For canonicalized datasets the value lies in (0, 0.5].
double minority_ratio(const InteractionDataset& dataset);

// Flips labels if group 1 is strictly larger than group 0.
void canonicalize_labels(std::vector<int>& labels);

// Per-user ranked top-k item lists; rank 1 is lists[u][0].
struct RecommendationTable {
  int k = 0;
  std::vector<std::vector<int>> lists;

  int num_users() const { return static_cast<int>(lists.size()); }
  friend bool operator==(const RecommendationTable&, const RecommendationTable&) = default;
};

// Checks the table invariants against the histories it was produced for:
// exactly k distinct items per list, none in the user's history.
void validate_recommendations(const RecommendationTable& table,
                              const InteractionDataset& histories);

}  // namespace fairrec

#endif  // FAIRREC_CORE_DATASET_HPP_
