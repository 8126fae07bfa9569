#include "fairrec/harness/movielens.hpp"

#include <fstream>
#include <unordered_map>

#include "fairrec/core/error.hpp"

namespace fairrec {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find("::", start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 2;
  }
}

std::string location(const std::filesystem::path& p, std::size_t line) {
  return p.string() + ":" + std::to_string(line);
}

int parse_int(const std::string& s, const std::filesystem::path& p, std::size_t line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw IoError(location(p, line) + ": expected an integer, got '" + s + "'");
}

std::ifstream open(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot open " + p.string());
  return in;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

DemographicAttribute attribute_from_string(const std::string& s) {
  if (s == "gender") return DemographicAttribute::kGender;
  if (s == "age") return DemographicAttribute::kAge;
  throw ConfigError("unknown attribute '" + s + "' (expected gender or age)");
}

std::string to_string(DemographicAttribute a) {
  return a == DemographicAttribute::kGender ? "gender" : "age";
}

IngestedDataset ingest_movielens(const std::filesystem::path& ratings_path,
                                 const std::filesystem::path& users_path,
                                 const MovieLensOptions& options) {
  IngestedDataset out;
  auto& report = out.report;

  // Raw attribute per external user id.
  std::unordered_map<std::string, int> raw_label;
  {
    auto in = open(users_path);
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
      line = strip_cr(line);
      if (line.empty()) continue;
      const auto f = split_fields(line);
      if (f.size() < 3) throw IoError(location(users_path, n) + ": expected user::gender::age::...");
      int label = 0;
      if (options.attribute == DemographicAttribute::kGender) {
        if (f[1] != "F" && f[1] != "M") {
          throw IoError(location(users_path, n) + ": gender must be F or M, got '" + f[1] + "'");
        }
        label = f[1] == "F" ? 1 : 0;
      } else {
        label = parse_int(f[2], users_path, n) >= options.age_threshold ? 1 : 0;
      }
      if (!raw_label.emplace(f[0], label).second) {
        throw DataError(location(users_path, n) + ": duplicate user '" + f[0] + "'");
      }
    }
  }

  std::vector<std::pair<int, int>> pairs;
  {
    auto in = open(ratings_path);
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
      line = strip_cr(line);
      if (line.empty()) continue;
      const auto f = split_fields(line);
      if (f.size() < 3) throw IoError(location(ratings_path, n) + ": expected user::item::rating::...");
      const int rating = parse_int(f[2], ratings_path, n);
      if (rating < options.min_rating) {
        ++report.dropped_ratings;
        continue;
      }
      if (!raw_label.contains(f[0])) {
        throw DataError(location(ratings_path, n) + ": unknown user '" + f[0] + "'");
      }
      pairs.emplace_back(out.users.intern(f[0]), out.items.intern(f[1]));
    }
  }
  if (pairs.empty()) throw DataError("no interactions in " + ratings_path.string());

  std::vector<int> labels(out.users.size());
  for (int u = 0; u < out.users.size(); ++u) labels[u] = raw_label.at(out.users.external(u));
  report.users_without_ratings = static_cast<int>(raw_label.size()) - out.users.size();

  out.dataset = InteractionDataset::from_pairs(out.users.size(), out.items.size(), pairs, labels,
                                               Provenance::kIngested);
  const bool flipped = out.dataset.label(0) != labels[0];

  report.num_users = out.dataset.num_users();
  report.num_items = out.dataset.num_items();
  report.num_interactions = out.dataset.num_interactions();
  report.minority_ratio = minority_ratio(out.dataset);
  if (options.attribute == DemographicAttribute::kGender) {
    report.minority_value = flipped ? "M" : "F";
  } else {
    report.minority_value = std::string(flipped ? "age<" : "age>=") + std::to_string(options.age_threshold);
  }

  std::vector<double> item_counts, user_counts;
  for (auto c : out.dataset.item_counts()) {
    if (c > 0) item_counts.push_back(static_cast<double>(c));
  }
  for (int u = 0; u < out.dataset.num_users(); ++u) {
    user_counts.push_back(static_cast<double>(out.dataset.items_of(u).size()));
  }
  try {
    report.item_count_fit = fit_log_normal(item_counts);
    report.user_count_fit = fit_log_normal(user_counts);
  } catch (const std::exception&) {
    // Tiny inputs cannot be fitted; the report keeps the zero defaults.
    report.item_count_fit = report.user_count_fit = LongTailParams{0.0, 0.0};
  }
  return out;
}

nlohmann::json IngestReport::to_json(const MovieLensOptions& options) const {
  return {{"attribute", fairrec::to_string(options.attribute)},
          {"min_rating", options.min_rating},
          {"age_threshold", options.age_threshold},
          {"num_users", num_users},
          {"num_items", num_items},
          {"num_interactions", num_interactions},
          {"dropped_ratings", dropped_ratings},
          {"users_without_ratings", users_without_ratings},
          {"minority_ratio", minority_ratio},
          {"minority_value", minority_value},
          {"item_count_fit", {{"family", "log-normal"}, {"mu", item_count_fit.mu}, {"sigma", item_count_fit.sigma}}},
          {"user_count_fit", {{"family", "log-normal"}, {"mu", user_count_fit.mu}, {"sigma", user_count_fit.sigma}}}};
}

void write_ingested(const IngestedDataset& ingested, const MovieLensOptions& options,
                    const std::filesystem::path& dir) {
  write_dataset_dir(ingested.dataset, dir);
  ingested.users.write(dir / "user_ids.tsv");
  ingested.items.write(dir / "item_ids.tsv");
  std::ofstream out(dir / "ingest_report.json");
  if (!out) throw IoError("cannot write " + (dir / "ingest_report.json").string());
  out << ingested.report.to_json(options).dump(2) << '\n';
}

}  // namespace fairrec
