#include "fairrec/metrics/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fairrec/core/error.hpp"

namespace fairrec {

bool is_known_metric(const std::string& name) {
  using namespace metric_names;
  return name == kDemographicRatioAuc || name == kNeuralAuc || name == kItemRatio ||
         name == kKendallTau || name == kRepresentationAuc;
}

MetricRange metric_range(const std::string& name) {
  if (name == metric_names::kKendallTau) return {-1.0, 1.0};
  return {0.0, 1.0};
}

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_report_csv(std::ostream& out, const std::vector<MetricReport>& rows) {
  out << "dataset_id,model,metric,k,seed,replication,value\n";
  for (const auto& r : rows) {
    out << r.dataset_id << ',' << r.model << ',' << r.metric << ',' << r.k << ',' << r.seed << ','
        << r.replication << ',' << (r.error.empty() ? format_value(r.value) : "nan") << '\n';
  }
}

void write_report_csv(const std::filesystem::path& path, const std::vector<MetricReport>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_report_csv(out, rows);
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<MetricReport> read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "dataset_id,model,metric,k,seed,replication,value") {
    throw IoError(path.string() + ":1: unexpected header");
  }
  std::vector<MetricReport> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 7) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 7 fields");
    }
    MetricReport r;
    r.dataset_id = f[0];
    r.model = f[1];
    r.metric = f[2];
    try {
      r.k = std::stoi(f[3]);
      r.seed = std::stoull(f[4]);
      r.replication = std::stoi(f[5]);
      r.value = f[6] == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(f[6]);
    } catch (const std::exception&) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
    if (std::isnan(r.value)) r.error = "failed";
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace fairrec
