#include "fairrec/datagen/generator.hpp"

#include <algorithm>
#include <cmath>

#include "fairrec/core/error.hpp"

namespace fairrec {

namespace {

Eigen::VectorXd concentration(int n_features, int n_categories, int category, double in_alpha,
                              double epsilon) {
  const int block = n_features / n_categories;
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(n_features, epsilon);
  alpha.segment(static_cast<Eigen::Index>(category) * block, block).setConstant(in_alpha);
  return alpha;
}

}  // namespace

LatentProfiles sample_latent_profiles(const GeneratorConfig& config, const SeedSpec& seed) {
  config.validate();
  const int F = config.n_features;
  LatentProfiles p;
  p.user_vectors.resize(config.n_users, F);
  p.item_vectors.resize(config.n_items, F);
  p.user_category.resize(config.n_users);
  p.item_category.resize(config.n_items);
  p.user_group.resize(config.n_users);

  const SeedSpec user_seed = seed.derive("users");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int u = 0; u < config.n_users; ++u) {
    Rng rng = user_seed.derive(static_cast<std::uint64_t>(u)).engine();
    // Category 0 is the majority; the remaining categories share the minority mass.
    int category = 0;
    if (unif(rng) < config.minority_ratio) {
      category = 1 + std::min(config.n_user_categories - 2,
                              static_cast<int>(unif(rng) * (config.n_user_categories - 1)));
    }
    p.user_category[u] = category;
    p.user_group[u] = category == 0 ? kMajority : kMinority;
    p.user_vectors.row(u) = sample_dirichlet(
        concentration(F, config.n_user_categories, category, config.in_category_alpha,
                      config.epsilon),
        rng).transpose();
  }
  canonicalize_labels(p.user_group);

  const SeedSpec item_seed = seed.derive("items");
  for (int i = 0; i < config.n_items; ++i) {
    Rng rng = item_seed.derive(static_cast<std::uint64_t>(i)).engine();
    const int category = std::min(config.n_item_categories - 1,
                                  static_cast<int>(unif(rng) * config.n_item_categories));
    p.item_category[i] = category;
    p.item_vectors.row(i) = sample_dirichlet(
        concentration(F, config.n_item_categories, category, config.in_category_alpha,
                      config.epsilon),
        rng).transpose();
  }
  return p;
}

ItemPopularity item_popularity_from_scores(const LongTailParams& params, std::vector<double> pop) {
  ItemPopularity out;
  out.normalized_density.resize(pop.size());
  double max_pdf = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    out.normalized_density[i] = params.pdf(pop[i]);
    max_pdf = std::max(max_pdf, out.normalized_density[i]);
  }
  if (!(max_pdf > 0.0)) throw DataError("popularity density vanishes on every item");
  for (double& d : out.normalized_density) d /= max_pdf;
  out.pop = std::move(pop);
  return out;
}

ItemPopularity sample_item_popularity(const LongTailParams& params, int n_items,
                                      const SeedSpec& seed) {
  return item_popularity_from_scores(params, sample_long_tail(params, n_items, seed));
}

double candidate_probability(double utility, double delta, double normalized_density) {
  const double exponent = delta * (1.0 - normalized_density);
  if (exponent <= 0.0) return utility > 0.0 ? 1.0 : 0.0;
  if (utility <= 0.0) return 0.0;
  return std::pow(std::min(utility, 1.0), exponent);
}

CandidateSets generate_candidates(const LatentProfiles& profiles, const ItemPopularity& popularity,
                                  double delta, const SeedSpec& seed) {
  const auto n_users = profiles.user_vectors.rows();
  const auto n_items = profiles.item_vectors.rows();
  if (static_cast<Eigen::Index>(popularity.normalized_density.size()) != n_items) {
    throw DataError("popularity does not cover the item universe");
  }
  CandidateSets candidates(n_users);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd raw(n_items);
  for (Eigen::Index u = 0; u < n_users; ++u) {
    raw.noalias() = profiles.item_vectors * profiles.user_vectors.row(u).transpose();
    const double normalizer = raw.maxCoeff();
    Rng rng = seed.derive(static_cast<std::uint64_t>(u)).engine();
    auto& out = candidates[u];
    for (Eigen::Index i = 0; i < n_items; ++i) {
      const double p =
          candidate_probability(raw[i] / normalizer, delta, popularity.normalized_density[i]);
      // One uniform per pair keeps each user's stream aligned with item indices.
      if (unif(rng) < p) out.push_back(static_cast<int>(i));
    }
  }
  return candidates;
}

InteractionDataset sample_interactions(const CandidateSets& candidates, int n_items,
                                       std::vector<int> user_groups,
                                       const LongTailParams& user_count_params, int tau,
                                       const SeedSpec& seed) {
  if (tau < 1) throw ConfigError("tau must be at least 1");
  std::vector<std::vector<int>> histories(candidates.size());
  for (std::size_t u = 0; u < candidates.size(); ++u) {
    if (candidates[u].empty()) {
      throw DataError("user " + std::to_string(u) + " has no candidate items");
    }
    Rng rng = seed.derive(static_cast<std::uint64_t>(u)).engine();
    const double draw = std::floor(sample_long_tail(user_count_params, rng));
    const auto cap = static_cast<double>(candidates[u].size());
    const auto n = static_cast<std::size_t>(std::min(draw + tau, cap));
    std::vector<int> pool = candidates[u];
    for (std::size_t j = 0; j < n; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, pool.size() - 1);
      std::swap(pool[j], pool[pick(rng)]);
    }
    pool.resize(n);
    histories[u] = std::move(pool);
  }
  return InteractionDataset::from_histories(n_items, std::move(histories), std::move(user_groups),
                                            Provenance::kSynthetic);
}

InteractionDataset generate_dataset(const GeneratorConfig& config, const SeedSpec& seed) {
  config.validate();
  const LatentProfiles profiles = sample_latent_profiles(config, seed.derive("profiles"));
  const ItemPopularity popularity =
      sample_item_popularity(config.item_pop_params, config.n_items, seed.derive("popularity"));
  const CandidateSets candidates =
      generate_candidates(profiles, popularity, config.delta, seed.derive("candidates"));
  return sample_interactions(candidates, config.n_items, profiles.user_group,
                             config.user_count_params, config.tau, seed.derive("interactions"));
}

}  // namespace fairrec
