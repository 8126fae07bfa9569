#ifndef FAIRREC_HARNESS_MOVIELENS_HPP_
#define FAIRREC_HARNESS_MOVIELENS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "fairrec/core/dataset.hpp"
#include "fairrec/core/io.hpp"
#include "fairrec/datagen/long_tail.hpp"

namespace fairrec {

enum class DemographicAttribute { kGender, kAge };

DemographicAttribute attribute_from_string(const std::string& s);
std::string to_string(DemographicAttribute a);

struct MovieLensOptions {
  DemographicAttribute attribute = DemographicAttribute::kGender;
  int min_rating = 1;      // ratings below this are dropped; 1 keeps every rating
  int age_threshold = 45;  // age code >= threshold forms one side of the split
};

struct IngestReport {
  int num_users = 0;
  int num_items = 0;
  std::int64_t num_interactions = 0;
  std::int64_t dropped_ratings = 0;    // below min_rating
  int users_without_ratings = 0;       // listed in the users file only
  double minority_ratio = 0.0;
  std::string minority_value;          // raw attribute value(s) of label 1
  LongTailParams item_count_fit;       // fitted to per-item interaction counts
  LongTailParams user_count_fit;       // fitted to per-user interaction counts

  nlohmann::json to_json(const MovieLensOptions& options) const;
};

struct IngestedDataset {
  InteractionDataset dataset;
  IdMap users;
  IdMap items;
  IngestReport report;
};

// Reads "::"-separated ratings (user::item::rating::timestamp) and users
// (user::gender::age::occupation::zip) files. External ids are re-indexed
// densely in order of first appearance in the ratings file.
IngestedDataset ingest_movielens(const std::filesystem::path& ratings_path,
                                 const std::filesystem::path& users_path,
                                 const MovieLensOptions& options = {});

// Dataset TSVs plus user_ids.tsv, item_ids.tsv and ingest_report.json.
void write_ingested(const IngestedDataset& ingested, const MovieLensOptions& options,
                    const std::filesystem::path& dir);

}  // namespace fairrec

#endif  // FAIRREC_HARNESS_MOVIELENS_HPP_
