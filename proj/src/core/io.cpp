#include "fairrec/core/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "fairrec/core/error.hpp"

namespace fairrec {

namespace fs = std::filesystem;

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string location(const fs::path& file, std::size_t line_no) {
  return file.string() + ":" + std::to_string(line_no);
}

}  // namespace

DatasetPaths DatasetPaths::in_directory(const fs::path& dir) {
  return {dir / "interactions.tsv", dir / "demographics.tsv"};
}

std::vector<std::string> split_tsv_row(const std::string& line, std::size_t expected,
                                       const fs::path& file, std::size_t line_no) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
    fields.back().pop_back();
  }
  if (fields.size() != expected) {
    throw IoError(location(file, line_no) + ": expected " + std::to_string(expected) +
                  " tab-separated fields, got " + std::to_string(fields.size()));
  }
  return fields;
}

int parse_index(const std::string& field, const fs::path& file, std::size_t line_no) {
  int value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || value < 0) {
    throw IoError(location(file, line_no) + ": invalid index '" + field + "'");
  }
  return value;
}

InteractionDataset read_dataset(const DatasetPaths& paths, const ReadOptions& options) {
  std::vector<std::pair<int, int>> pairs;
  int max_user = -1;
  int max_item = -1;
  {
    auto in = open_in(paths.interactions);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      auto f = split_tsv_row(line, 2, paths.interactions, line_no);
      const int u = parse_index(f[0], paths.interactions, line_no);
      const int i = parse_index(f[1], paths.interactions, line_no);
      pairs.emplace_back(u, i);
      max_user = std::max(max_user, u);
      max_item = std::max(max_item, i);
    }
  }
  if (pairs.empty()) throw DataError("no interactions in " + paths.interactions.string());

  std::map<int, int> label_of;
  {
    auto in = open_in(paths.demographics);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      auto f = split_tsv_row(line, 2, paths.demographics, line_no);
      const int u = parse_index(f[0], paths.demographics, line_no);
      const int g = parse_index(f[1], paths.demographics, line_no);
      if (g > 1) {
        throw IoError(location(paths.demographics, line_no) + ": group label must be 0 or 1");
      }
      if (u > max_user) {
        throw DataError(location(paths.demographics, line_no) + ": unknown user " + f[0]);
      }
      if (!label_of.emplace(u, g).second) {
        throw IoError(location(paths.demographics, line_no) + ": duplicate user " + f[0]);
      }
    }
  }
  const int num_users = max_user + 1;
  std::vector<int> labels(num_users, -1);
  for (auto [u, g] : label_of) labels[u] = g;
  for (int u = 0; u < num_users; ++u) {
    if (labels[u] < 0) {
      throw DataError("user " + std::to_string(u) + " has no demographic label");
    }
  }
  int num_items = max_item + 1;
  if (options.num_items) {
    if (*options.num_items < num_items) {
      throw DataError("item index " + std::to_string(max_item) + " exceeds declared item count " +
                      std::to_string(*options.num_items));
    }
    num_items = *options.num_items;
  }
  return InteractionDataset::from_pairs(num_users, num_items, pairs, std::move(labels),
                                        options.provenance);
}

void write_dataset(const InteractionDataset& dataset, const DatasetPaths& paths) {
  {
    auto out = open_out(paths.interactions);
    for (int u = 0; u < dataset.num_users(); ++u) {
      for (int i : dataset.items_of(u)) out << u << '\t' << i << '\n';
    }
    if (!out) throw IoError("write failed: " + paths.interactions.string());
  }
  auto out = open_out(paths.demographics);
  for (int u = 0; u < dataset.num_users(); ++u) out << u << '\t' << dataset.label(u) << '\n';
  if (!out) throw IoError("write failed: " + paths.demographics.string());
}

InteractionDataset read_dataset_dir(const fs::path& dir) {
  ReadOptions options;
  const fs::path meta_path = dir / "dataset.json";
  if (fs::exists(meta_path)) {
    auto in = open_in(meta_path);
    nlohmann::json meta;
    try {
      meta = nlohmann::json::parse(in);
      options.num_items = meta.at("num_items").get<int>();
      options.provenance = provenance_from_string(meta.value("provenance", "synthetic"));
    } catch (const nlohmann::json::exception& e) {
      throw IoError(meta_path.string() + ": " + e.what());
    }
  }
  return read_dataset(DatasetPaths::in_directory(dir), options);
}

void write_dataset_dir(const InteractionDataset& dataset, const fs::path& dir) {
  fs::create_directories(dir);
  write_dataset(dataset, DatasetPaths::in_directory(dir));
  nlohmann::json meta = {{"num_users", dataset.num_users()},
                         {"num_items", dataset.num_items()},
                         {"num_interactions", dataset.num_interactions()},
                         {"minority_ratio", minority_ratio(dataset)},
                         {"provenance", to_string(dataset.provenance())}};
  auto out = open_out(dir / "dataset.json");
  out << meta.dump(2) << '\n';
}

void write_recommendations(const RecommendationTable& table, const fs::path& path) {
  auto out = open_out(path);
  for (int u = 0; u < table.num_users(); ++u) {
    const auto& list = table.lists[u];
    for (std::size_t r = 0; r < list.size(); ++r) {
      out << u << '\t' << r + 1 << '\t' << list[r] << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

RecommendationTable read_recommendations(const fs::path& path, int num_users) {
  auto in = open_in(path);
  std::vector<std::map<int, int>> ranked(num_users);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto f = split_tsv_row(line, 3, path, line_no);
    const int u = parse_index(f[0], path, line_no);
    const int rank = parse_index(f[1], path, line_no);
    const int item = parse_index(f[2], path, line_no);
    if (u >= num_users) throw DataError(location(path, line_no) + ": unknown user " + f[0]);
    if (rank < 1 || !ranked[u].emplace(rank, item).second) {
      throw IoError(location(path, line_no) + ": invalid or repeated rank " + f[1]);
    }
  }
  RecommendationTable table;
  for (int u = 0; u < num_users; ++u) {
    const int len = static_cast<int>(ranked[u].size());
    if (u == 0) table.k = len;
    if (len != table.k || (len > 0 && ranked[u].rbegin()->first != len)) {
      throw DataError(path.string() + ": user " + std::to_string(u) +
                      " does not have ranks 1.." + std::to_string(table.k));
    }
    std::vector<int> list;
    for (auto& [rank, item] : ranked[u]) list.push_back(item);
    table.lists.push_back(std::move(list));
  }
  return table;
}

int IdMap::intern(const std::string& external_id) {
  auto [it, inserted] = index_.emplace(external_id, static_cast<int>(external_.size()));
  if (inserted) external_.push_back(external_id);
  return it->second;
}

std::optional<int> IdMap::find(const std::string& external_id) const {
  auto it = index_.find(external_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void IdMap::write(const fs::path& path) const {
  auto out = open_out(path);
  for (int j = 0; j < size(); ++j) out << external_[j] << '\t' << j << '\n';
}

IdMap IdMap::read(const fs::path& path) {
  auto in = open_in(path);
  IdMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_tsv_row(line, 2, path, line_no);
    if (parse_index(f[1], path, line_no) != map.size() || map.find(f[0])) {
      throw IoError(location(path, line_no) + ": id map is not a dense enumeration");
    }
    map.intern(f[0]);
  }
  return map;
}

}  // namespace fairrec
