#ifndef FAIRREC_METRICS_REPORT_HPP_
#define FAIRREC_METRICS_REPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fairrec {

// Metric names as they appear in report.csv.
namespace metric_names {
inline constexpr const char* kDemographicRatioAuc = "demographic_ratio_auc";
inline constexpr const char* kNeuralAuc = "neural_auc";
inline constexpr const char* kItemRatio = "item_ratio";
inline constexpr const char* kKendallTau = "kendall_tau";
inline constexpr const char* kRepresentationAuc = "representation_auc";
}  // namespace metric_names

bool is_known_metric(const std::string& name);

// Closed interval a metric value must lie in.
struct MetricRange {
  double lo;
  double hi;
};
MetricRange metric_range(const std::string& name);

struct MetricReport {
  std::string dataset_id;
  std::string model;
  std::string metric;
  int k = 0;
  std::uint64_t seed = 0;
  int replication = 0;
  double value = 0.0;
  // Empty on success; otherwise the failure that produced this row, whose
  // value is then NaN.
  std::string error;
};

// report.csv: dataset_id,model,metric,k,seed,replication,value
// Values use the shortest round-trip decimal form; failed rows print "nan".
void write_report_csv(std::ostream& out, const std::vector<MetricReport>& rows);
void write_report_csv(const std::filesystem::path& path, const std::vector<MetricReport>& rows);
std::vector<MetricReport> read_report_csv(const std::filesystem::path& path);

std::string format_value(double v);

}  // namespace fairrec

#endif  // FAIRREC_METRICS_REPORT_HPP_
