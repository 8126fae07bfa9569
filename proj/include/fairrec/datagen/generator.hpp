#ifndef FAIRREC_DATAGEN_GENERATOR_HPP_
#define FAIRREC_DATAGEN_GENERATOR_HPP_

#include <vector>

#include <Eigen/Dense>

#include "fairrec/core/dataset.hpp"
#include "fairrec/core/random.hpp"
#include "fairrec/datagen/config.hpp"

namespace fairrec {

// Rows of user_vectors / item_vectors are points on the feature simplex.
struct LatentProfiles {
  Eigen::MatrixXd user_vectors;  // n_users x F
  Eigen::MatrixXd item_vectors;  // n_items x F
  std::vector<int> user_category;
  std::vector<int> item_category;
  // Canonicalized binary demographic label per user.
  std::vector<int> user_group;
};

struct ItemPopularity {
  std::vector<double> pop;
  // pdf(pop_i) divided by the largest pdf over all items: in [0, 1], max 1.
  std::vector<double> normalized_density;
};

// candidates[u] is the sorted list of items with d_hat(u, i) = 1.
using CandidateSets = std::vector<std::vector<int>>;

LatentProfiles sample_latent_profiles(const GeneratorConfig& config, const SeedSpec& seed);

ItemPopularity sample_item_popularity(const LongTailParams& params, int n_items,
                                      const SeedSpec& seed);
// Rescales pdf(pop_i) by its maximum over the given scores.
ItemPopularity item_popularity_from_scores(const LongTailParams& params, std::vector<double> pop);

// Largest raw dot product of the user vector with any item vector.
template <typename UserDerived, typename ItemsDerived>
double utility_normalizer(const Eigen::MatrixBase<UserDerived>& user_vector,
                          const Eigen::MatrixBase<ItemsDerived>& item_vectors) {
  return (item_vectors * user_vector.transpose()).maxCoeff();
}

// Raw dot product rescaled by the user's normalizer; 1 for the user's best
// item.
template <typename UserDerived, typename ItemDerived>
double utility(const Eigen::MatrixBase<UserDerived>& user_vector,
               const Eigen::MatrixBase<ItemDerived>& item_vector, double per_user_normalizer) {
  return user_vector.dot(item_vector) / per_user_normalizer;
}

// Inclusion probability t^(delta * (1 - density)), with 0^0 = 1.
double candidate_probability(double utility, double delta, double normalized_density);

CandidateSets generate_candidates(const LatentProfiles& profiles, const ItemPopularity& popularity,
                                  double delta, const SeedSpec& seed);

// n_u = floor(LongTail(beta)) + tau, capped at the candidate count; items
// drawn uniformly without replacement. A user with no candidates raises
// DataError naming the user.
InteractionDataset sample_interactions(const CandidateSets& candidates, int n_items,
                                       std::vector<int> user_groups,
                                       const LongTailParams& user_count_params, int tau,
                                       const SeedSpec& seed);

InteractionDataset generate_dataset(const GeneratorConfig& config, const SeedSpec& seed);

}  // namespace fairrec

#endif  // FAIRREC_DATAGEN_GENERATOR_HPP_
