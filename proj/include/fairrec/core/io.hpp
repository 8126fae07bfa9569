#ifndef FAIRREC_CORE_IO_HPP_
#define FAIRREC_CORE_IO_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairrec/core/dataset.hpp"

namespace fairrec {

struct DatasetPaths {
  std::filesystem::path interactions;  // user_id<TAB>item_id
  std::filesystem::path demographics;  // user_id<TAB>group_label

  // interactions.tsv / demographics.tsv inside a directory.
  static DatasetPaths in_directory(const std::filesystem::path& dir);
};

struct ReadOptions {
  // Size of the item universe. Defaults to max item id + 1.
  std::optional<int> num_items;
  Provenance provenance = Provenance::kSynthetic;
};

// Reads a dataset whose ids are already dense indices. Malformed rows raise
// IoError naming file and line; demographics rows for users that have no
// interactions raise DataError.
InteractionDataset read_dataset(const DatasetPaths& paths, const ReadOptions& options = {});
void write_dataset(const InteractionDataset& dataset, const DatasetPaths& paths);

// Directory form: additionally reads/writes dataset.json holding the item
// universe size and provenance, so round trips are exact.
InteractionDataset read_dataset_dir(const std::filesystem::path& dir);
void write_dataset_dir(const InteractionDataset& dataset, const std::filesystem::path& dir);

// recommendations.tsv: user_id<TAB>rank<TAB>item_id, rank 1-based.
void write_recommendations(const RecommendationTable& table, const std::filesystem::path& path);
RecommendationTable read_recommendations(const std::filesystem::path& path, int num_users);

// Maps external string ids to dense indices in first-seen order.
class IdMap {
 public:
  int intern(const std::string& external_id);
  std::optional<int> find(const std::string& external_id) const;
  const std::string& external(int dense) const { return external_[dense]; }
  int size() const { return static_cast<int>(external_.size()); }

  // idmap.tsv: external_id<TAB>dense_index
  void write(const std::filesystem::path& path) const;
  static IdMap read(const std::filesystem::path& path);

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> external_;
};

// Splits on tabs; the row must have exactly `expected` fields.
std::vector<std::string> split_tsv_row(const std::string& line, std::size_t expected,
                                       const std::filesystem::path& file, std::size_t line_no);
int parse_index(const std::string& field, const std::filesystem::path& file, std::size_t line_no);

}  // namespace fairrec

#endif  // FAIRREC_CORE_IO_HPP_
