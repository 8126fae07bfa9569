#include "fairrec/datagen/config.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "fairrec/core/error.hpp"

namespace fairrec {

void GeneratorConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("generator config: " + msg); };
  if (n_users < 4) fail("n_users must be at least 4");
  if (n_items < 1) fail("n_items must be positive");
  if (n_user_categories < 2) fail("n_user_categories must be at least 2");
  if (n_item_categories < 1) fail("n_item_categories must be positive");
  if (n_features < 1 || n_features % std::max(n_user_categories, n_item_categories) != 0) {
    fail("n_features must be divisible by the largest category count");
  }
  if (n_features % n_user_categories != 0 || n_features % n_item_categories != 0) {
    fail("n_features must be divisible by both category counts");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) fail("epsilon must lie in (0, 1]");
  if (!(delta >= 0.0)) fail("delta must be nonnegative");
  if (!(item_pop_params.sigma > 0.0)) fail("item_pop_params.sigma must be positive");
  if (!(user_count_params.sigma > 0.0)) fail("user_count_params.sigma must be positive");
  if (tau < 1) fail("tau must be at least 1");
  if (!(minority_ratio > 0.0 && minority_ratio <= 0.5)) fail("minority_ratio must lie in (0, 0.5]");
  if (!(in_category_alpha > 0.0)) fail("in_category_alpha must be positive");
}

namespace {

LongTailParams long_tail_from_json(const nlohmann::json& j, LongTailParams fallback,
                                   const char* name) {
  if (!j.is_object()) throw ConfigError(std::string(name) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "mu" && key != "sigma" && key != "family") {
      throw ConfigError(std::string(name) + ": unknown field '" + key + "'");
    }
  }
  if (j.contains("family") && j.at("family") != "log-normal") {
    throw ConfigError(std::string(name) + ": only the log-normal family is supported");
  }
  fallback.mu = j.value("mu", fallback.mu);
  fallback.sigma = j.value("sigma", fallback.sigma);
  return fallback;
}

nlohmann::json long_tail_to_json(const LongTailParams& p) {
  return {{"family", "log-normal"}, {"mu", p.mu}, {"sigma", p.sigma}};
}

}  // namespace

GeneratorConfig generator_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("generator config must be a JSON object");
  static const std::set<std::string> known = {
      "n_users",        "n_items",           "n_features", "n_user_categories",
      "n_item_categories", "epsilon",        "delta",      "item_pop_params",
      "user_count_params", "tau",            "minority_ratio", "in_category_alpha"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("generator config: unknown field '" + key + "'");
  }
  GeneratorConfig c;
  try {
    c.n_users = j.value("n_users", c.n_users);
    c.n_items = j.value("n_items", c.n_items);
    c.n_features = j.value("n_features", c.n_features);
    c.n_user_categories = j.value("n_user_categories", c.n_user_categories);
    c.n_item_categories = j.value("n_item_categories", c.n_item_categories);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.delta = j.value("delta", c.delta);
    c.tau = j.value("tau", c.tau);
    c.minority_ratio = j.value("minority_ratio", c.minority_ratio);
    c.in_category_alpha = j.value("in_category_alpha", c.in_category_alpha);
    if (j.contains("item_pop_params")) {
      c.item_pop_params = long_tail_from_json(j["item_pop_params"], c.item_pop_params,
                                              "item_pop_params");
    }
    if (j.contains("user_count_params")) {
      c.user_count_params = long_tail_from_json(j["user_count_params"], c.user_count_params,
                                                "user_count_params");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("generator config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const GeneratorConfig& c) {
  return {{"n_users", c.n_users},
          {"n_items", c.n_items},
          {"n_features", c.n_features},
          {"n_user_categories", c.n_user_categories},
          {"n_item_categories", c.n_item_categories},
          {"epsilon", c.epsilon},
          {"delta", c.delta},
          {"item_pop_params", long_tail_to_json(c.item_pop_params)},
          {"user_count_params", long_tail_to_json(c.user_count_params)},
          {"tau", c.tau},
          {"minority_ratio", c.minority_ratio},
          {"in_category_alpha", c.in_category_alpha}};
}

}  // namespace fairrec
