#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fairrec/core/error.hpp"
#include "fairrec/harness/config_json.hpp"
#include "fairrec/harness/experiment.hpp"
#include "fairrec/harness/movielens.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace fairrec;

namespace {

const fs::path kData = FAIRREC_TEST_DATA;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Small but complete experiment: every model kind and every metric.
json small_config() {
  return json::parse(R"({
    "dataset": {"generate": {"n_users": 300, "n_items": 200, "epsilon": 0.3}},
    "models": ["pop", "rand", "dem_pop",
               {"id": "latent", "type": "latent", "latent_dim": 8, "epochs": 2, "fairness_weight": 0.5}],
    "k": 10,
    "replications": 2,
    "sweep": {"parameter": "epsilon", "values": [0.2, 0.6]},
    "seed": 7,
    "neural": {"embedding_dim": 8, "embedding_epochs": 1, "max_epochs": 20, "classifier_seeds": 1},
    "probe": {"probe_seeds": 1}
  })");
}

std::vector<MetricReport> rows_of(const SweepResult& r, const std::string& model) {
  std::vector<MetricReport> out;
  for (const auto& row : r.rows) {
    if (row.model == model) out.push_back(row);
  }
  return out;
}

bool same_rows(const std::vector<MetricReport>& a, const std::vector<MetricReport>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool both_nan = std::isnan(a[i].value) && std::isnan(b[i].value);
    if (a[i].dataset_id != b[i].dataset_id || a[i].metric != b[i].metric || a[i].seed != b[i].seed ||
        a[i].replication != b[i].replication || (!both_nan && a[i].value != b[i].value)) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST(Experiment, SingleCellGivesOneRow) {
  auto j = json::parse(R"({
    "dataset": {"generate": {"n_users": 300, "n_items": 200}},
    "models": ["pop"], "metrics": ["demographic_ratio_auc"], "replications": 1,
    "sweep": {"parameter": "epsilon", "values": [0.5]}
  })");
  const auto r = run_experiment(experiment_config_from_json(j));
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].dataset_id, "epsilon=0.5");
  EXPECT_EQ(r.rows[0].model, "pop");
  EXPECT_EQ(r.rows[0].k, 40);
  EXPECT_TRUE(r.rows[0].error.empty());
  EXPECT_FALSE(r.has_failures());
}

class SmallSweep : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { result_ = new SweepResult(run_experiment(experiment_config_from_json(small_config()))); }
  static void TearDownTestSuite() { delete result_; }
  static SweepResult* result_;
};
SweepResult* SmallSweep::result_ = nullptr;

TEST_F(SmallSweep, RowCountCoversGrid) {
  // 2 values x 2 replications x 4 models x 5 metrics.
  EXPECT_EQ(result_->rows.size(), 80u);
  EXPECT_FALSE(result_->has_failures());
  int not_applicable = 0;
  for (const auto& row : result_->rows) {
    if (row.error == kNotApplicable) {
      ++not_applicable;
      EXPECT_EQ(row.metric, metric_names::kRepresentationAuc);
      EXPECT_NE(row.model, "latent");
      EXPECT_FALSE(is_failure(row));
    } else {
      EXPECT_TRUE(row.error.empty()) << row.model << " " << row.metric << ": " << row.error;
      const auto range = metric_range(row.metric);
      EXPECT_GE(row.value, range.lo);
      EXPECT_LE(row.value, range.hi);
    }
  }
  EXPECT_EQ(not_applicable, 12);
}

TEST_F(SmallSweep, RerunIsByteIdentical) {
  const fs::path a = fs::temp_directory_path() / "fairrec_sweep_a";
  const fs::path b = fs::temp_directory_path() / "fairrec_sweep_b";
  fs::remove_all(a);
  fs::remove_all(b);
  write_sweep_outputs(*result_, a);
  auto cfg = experiment_config_from_json(small_config());
  cfg.workers = 3;
  write_sweep_outputs(run_experiment(cfg), b);
  for (const char* f : {"report.csv", "aggregate.csv"}) {
    ASSERT_TRUE(fs::exists(a / f));
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(slurp(a / "report.csv").substr(0, 48), "dataset_id,model,metric,k,seed,replication,value");
}

TEST_F(SmallSweep, RemovingAModelLeavesOthersAlone) {
  auto j = small_config();
  j["models"].erase(1);  // rand
  const auto fewer = run_experiment(experiment_config_from_json(j));
  EXPECT_TRUE(rows_of(fewer, "rand").empty());
  for (const char* m : {"pop", "dem_pop", "latent"}) {
    EXPECT_TRUE(same_rows(rows_of(fewer, m), rows_of(*result_, m))) << m;
  }
}

TEST_F(SmallSweep, CellSeedsIgnoreOtherGridPoints) {
  auto j = small_config();
  j["sweep"]["values"] = {0.6};
  const auto single = run_experiment(experiment_config_from_json(j));
  std::vector<MetricReport> expected;
  for (const auto& row : result_->rows) {
    if (row.dataset_id == "epsilon=0.6") expected.push_back(row);
  }
  EXPECT_TRUE(same_rows(single.rows, expected));
}

TEST_F(SmallSweep, AggregatesMatchRows) {
  for (const auto& agg : result_->aggregates) {
    std::vector<double> v;
    for (const auto& row : result_->rows) {
      if (row.dataset_id == agg.dataset_id && row.model == agg.model && row.metric == agg.metric &&
          row.error.empty()) {
        v.push_back(row.value);
      }
    }
    ASSERT_EQ(agg.count, static_cast<int>(v.size()));
    if (v.empty()) continue;
    double mean = 0;
    for (double x : v) mean += x;
    mean /= v.size();
    EXPECT_NEAR(agg.mean, mean, 1e-12);
  }
}

TEST(Experiment, FairnessSweepAtZeroEqualsUnconstrainedRun) {
  auto j = small_config();
  j["sweep"] = {{"parameter", "fairness_weight"}, {"values", {0.0}}};
  j["models"] = json::array({json{{"id", "latent"}, {"type", "latent"}, {"latent_dim", 8}, {"epochs", 2}}});
  j["metrics"] = {"demographic_ratio_auc", "representation_auc"};
  const auto swept = run_experiment(experiment_config_from_json(j));
  j.erase("sweep");
  j["models"][0]["fairness_weight"] = 0.0;
  const auto plain = run_experiment(experiment_config_from_json(j));
  ASSERT_EQ(swept.rows.size(), plain.rows.size());
  for (std::size_t i = 0; i < plain.rows.size(); ++i) {
    EXPECT_EQ(swept.rows[i].value, plain.rows[i].value);
    EXPECT_EQ(swept.rows[i].dataset_id, "fairness_weight=0");
    EXPECT_EQ(plain.rows[i].dataset_id, "base");
  }
}

TEST(Experiment, FailingCellIsIsolated) {
  auto j = small_config();
  j["sweep"]["values"] = {0.5};
  j["replications"] = 1;
  j["metrics"] = {"demographic_ratio_auc"};
  j["models"] = json::array({"pop", json{{"id", "bad"}, {"type", "latent"}, {"latent_dim", 4},
                                          {"epochs", 3}, {"learning_rate", 1e308}}});
  const auto r = run_experiment(experiment_config_from_json(j));
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_TRUE(r.has_failures());
  const auto bad = rows_of(r, "bad");
  ASSERT_EQ(bad.size(), 1u);
  EXPECT_TRUE(std::isnan(bad[0].value));
  EXPECT_NE(bad[0].error.find("diverged"), std::string::npos);
  EXPECT_TRUE(rows_of(r, "pop")[0].error.empty());

  const fs::path dir = fs::temp_directory_path() / "fairrec_sweep_fail";
  fs::remove_all(dir);
  write_sweep_outputs(r, dir);
  EXPECT_NE(slurp(dir / "errors.tsv").find("diverged"), std::string::npos);
  EXPECT_NE(slurp(dir / "report.csv").find(",nan"), std::string::npos);
}

TEST(Aggregate, MeanStddevAndFailures) {
  std::vector<MetricReport> rows;
  for (int r = 0; r < 3; ++r) rows.push_back({"base", "m", "item_ratio", 40, 1, r, 1.0 + r, ""});
  rows.push_back({"base", "m", "item_ratio", 40, 1, 3, std::nan(""), "boom"});
  rows.push_back({"base", "m", "kendall_tau", 40, 1, 0, 0.25, ""});
  rows.push_back({"base", "p", "representation_auc", 40, 1, 0, std::nan(""), kNotApplicable});
  const auto agg = aggregate(rows);
  ASSERT_EQ(agg.size(), 3u);
  const auto& ir = agg[0];
  EXPECT_EQ(ir.metric, "item_ratio");
  EXPECT_EQ(ir.count, 3);
  EXPECT_EQ(ir.failed, 1);
  EXPECT_DOUBLE_EQ(ir.mean, 2.0);
  EXPECT_DOUBLE_EQ(ir.stddev, 1.0);
  EXPECT_EQ(agg[1].count, 1);
  EXPECT_EQ(agg[1].stddev, 0.0);
  EXPECT_EQ(agg[2].failed, 0);
  EXPECT_EQ(agg[2].count, 0);
  EXPECT_TRUE(is_failure(rows[3]));
  EXPECT_FALSE(is_failure(rows[5]));
}

TEST(Grids, Defaults) {
  EXPECT_EQ(default_grid("n_users"), (std::vector<double>{500, 1000, 2000, 3000, 4000}));
  const auto eps = default_grid("epsilon");
  EXPECT_EQ(eps.size(), 50u);
  EXPECT_DOUBLE_EQ(eps.front(), 0.02);
  EXPECT_DOUBLE_EQ(eps.back(), 1.0);
  for (double v : default_grid("minority_ratio")) EXPECT_TRUE(v > 0 && v <= 0.5);
  EXPECT_EQ(default_grid("fairness_weight").front(), 0.0);
  EXPECT_THROW(default_grid("tau"), ConfigError);
  const GeneratorConfig g;
  EXPECT_EQ(g.n_users, 4000);
  EXPECT_EQ(g.n_items, 4000);
  EXPECT_DOUBLE_EQ(g.minority_ratio, 0.3);
  EXPECT_EQ(ExperimentConfig{}.k, 40);
  EXPECT_EQ(ExperimentConfig{}.replications, 5);
}

TEST(ConfigJson, RejectsInvalidConfigs) {
  const auto bad = [](auto mutate) {
    auto j = small_config();
    mutate(j);
    return j;
  };
  const std::vector<json> cases = {
      bad([](json& j) { j["k"] = 0; }),
      bad([](json& j) { j["replications"] = 0; }),
      bad([](json& j) { j["colour"] = "red"; }),
      bad([](json& j) { j["metrics"] = {"precision"}; }),
      bad([](json& j) { j["metrics"] = {"item_ratio", "item_ratio"}; }),
      bad([](json& j) { j["sweep"]["parameter"] = "colour"; }),
      bad([](json& j) { j["sweep"] = {{"parameter", "tau"}, {"values", json::array()}}; }),
      bad([](json& j) { j["sweep"]["values"] = {-0.5}; }),
      bad([](json& j) { j["models"] = {"pop", "pop"}; }),
      bad([](json& j) { j["models"] = {"svd"}; }),
      bad([](json& j) { j["models"] = {json{{"type", "pop"}, {"epochs", 3}}}; }),
      bad([](json& j) { j["models"][3]["dropout"] = 1.5; }),
      bad([](json& j) { j["dataset"] = json::object(); }),
      bad([](json& j) { j["dataset"]["generate"]["epsilon"] = 0; }),
      bad([](json& j) { j["k"] = "forty"; }),
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    EXPECT_THROW(experiment_config_from_json(cases[i]), ConfigError) << "case " << i;
  }
}

TEST(ConfigJson, RoundTripsAndDefaults) {
  const auto c = experiment_config_from_json(small_config());
  const auto back = experiment_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(back.models[3].latent.fairness_weight, 0.5);
  EXPECT_EQ(back.evaluation.neural.embedding.dim, 8);

  auto empty_grid = small_config();
  empty_grid["sweep"]["values"] = json::array();
  EXPECT_EQ(experiment_config_from_json(empty_grid).sweep->values, default_grid("epsilon"));

  const auto d = experiment_config_from_json(json::parse(R"({"dataset": {"generate": {}}})"));
  EXPECT_EQ(d.models.size(), 5u);
  EXPECT_EQ(d.metrics, default_metrics());
  EXPECT_EQ(d.k, 40);
  EXPECT_THROW(load_experiment_config(kData / "missing.json"), IoError);
}

TEST(MovieLens, ToyFixtureGender) {
  const auto in = ingest_movielens(kData / "ml_toy/ratings.dat", kData / "ml_toy/users.dat");
  // Dense ids follow first appearance in the ratings file.
  EXPECT_EQ(in.users.external(0), "20");
  EXPECT_EQ(in.users.external(1), "10");
  EXPECT_EQ(in.users.external(2), "30");
  EXPECT_EQ(in.items.external(0), "300");
  EXPECT_EQ(in.items.external(1), "100");
  EXPECT_EQ(in.items.external(2), "200");
  const auto& d = in.dataset;
  EXPECT_EQ(d.num_users(), 3);
  EXPECT_EQ(d.num_items(), 3);
  EXPECT_EQ(d.num_interactions(), 5);
  EXPECT_EQ(std::vector<int>(d.items_of(0).begin(), d.items_of(0).end()), (std::vector<int>{0, 1}));
  EXPECT_EQ(std::vector<int>(d.items_of(1).begin(), d.items_of(1).end()), (std::vector<int>{0, 1}));
  EXPECT_EQ(std::vector<int>(d.items_of(2).begin(), d.items_of(2).end()), (std::vector<int>{2}));
  EXPECT_EQ(std::vector<int>(d.labels().begin(), d.labels().end()), (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(in.report.minority_value, "F");
  EXPECT_DOUBLE_EQ(in.report.minority_ratio, 1.0 / 3.0);
  EXPECT_EQ(in.report.users_without_ratings, 1);
  EXPECT_EQ(in.report.dropped_ratings, 0);
}

TEST(MovieLens, ToyFixtureAgeAndThreshold) {
  MovieLensOptions o;
  o.attribute = DemographicAttribute::kAge;
  const auto age = ingest_movielens(kData / "ml_toy/ratings.dat", kData / "ml_toy/users.dat", o);
  EXPECT_EQ(std::vector<int>(age.dataset.labels().begin(), age.dataset.labels().end()),
            (std::vector<int>{1, 0, 0}));
  EXPECT_EQ(age.report.minority_value, "age>=45");

  MovieLensOptions strict;
  strict.min_rating = 3;
  const auto s = ingest_movielens(kData / "ml_toy/ratings.dat", kData / "ml_toy/users.dat", strict);
  EXPECT_EQ(s.dataset.num_users(), 2);
  EXPECT_EQ(s.dataset.num_interactions(), 3);
  EXPECT_EQ(s.report.dropped_ratings, 2);
  EXPECT_EQ(s.report.users_without_ratings, 2);
}

TEST(MovieLens, ErrorsCarryLocation) {
  try {
    ingest_movielens(kData / "ml_toy/ratings.dat", kData / "ml_toy/users_bad.dat");
    FAIL() << "expected an error";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("users_bad.dat:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ingest_movielens(kData / "ml_toy/nope.dat", kData / "ml_toy/users.dat"), IoError);
  EXPECT_THROW(attribute_from_string("height"), ConfigError);
}

TEST(MovieLens, WritesDatasetAndReport) {
  const auto in = ingest_movielens(kData / "ml_toy/ratings.dat", kData / "ml_toy/users.dat");
  const fs::path dir = fs::temp_directory_path() / "fairrec_ingest";
  fs::remove_all(dir);
  write_ingested(in, {}, dir);
  const auto report = json::parse(slurp(dir / "ingest_report.json"));
  EXPECT_EQ(report.at("num_users"), 3);
  EXPECT_EQ(report.at("minority_value"), "F");
  EXPECT_TRUE(fs::exists(dir / "user_ids.tsv"));
  EXPECT_TRUE(fs::exists(dir / "item_ids.tsv"));
}
