#ifndef FAIRREC_DATAGEN_CONFIG_HPP_
#define FAIRREC_DATAGEN_CONFIG_HPP_

#include <nlohmann/json.hpp>

#include "fairrec/datagen/long_tail.hpp"

namespace fairrec {

// Log-normal fits to the per-item and per-user interaction counts of
// Movielens-1M. Override through GeneratorConfig when refitting.
inline constexpr LongTailParams kDefaultItemPopularity{4.82, 1.25};
inline constexpr LongTailParams kDefaultUserCounts{4.56, 1.04};

struct GeneratorConfig {
  int n_users = 4000;
  int n_items = 4000;
  int n_features = 8;
  int n_user_categories = 2;
  int n_item_categories = 2;
  // Dirichlet concentration on features outside the owner's category block.
  double epsilon = 0.5;
  // Exponent scale of the popularity term in candidate inclusion.
  double delta = 10.0;
  LongTailParams item_pop_params = kDefaultItemPopularity;
  LongTailParams user_count_params = kDefaultUserCounts;
  int tau = 5;
  double minority_ratio = 0.3;
  // Dirichlet concentration on the owner's category block.
  double in_category_alpha = 1.0;

  // Throws ConfigError describing the first violated constraint.
  void validate() const;

  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

// gen-config.json: every field by name; omitted fields keep their defaults,
// unknown fields are rejected.
GeneratorConfig generator_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GeneratorConfig& config);

}  // namespace fairrec

#endif  // FAIRREC_DATAGEN_CONFIG_HPP_
