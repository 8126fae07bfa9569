#ifndef FAIRREC_HARNESS_EXPERIMENT_HPP_
#define FAIRREC_HARNESS_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fairrec/core/dataset.hpp"
#include "fairrec/core/random.hpp"
#include "fairrec/datagen/config.hpp"
#include "fairrec/metrics/probe.hpp"
#include "fairrec/metrics/ranking.hpp"
#include "fairrec/metrics/report.hpp"
#include "fairrec/neuralauc/list_classifier.hpp"
#include "fairrec/neuralauc/skipgram.hpp"
#include "fairrec/recommenders/latent_model.hpp"

namespace fairrec {

enum class ModelKind { kPop, kRand, kDemPop, kMaxDivision, kLatent };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct ModelSpec {
  std::string id;
  ModelKind kind = ModelKind::kPop;
  LatentHyper latent;  // only read for kLatent
};

struct DatasetSource {
  // Either a generator configuration or a dataset directory on disk.
  std::optional<GeneratorConfig> generate;
  std::optional<std::filesystem::path> ingest;
};

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
};

// Settings of the neural AUC pipeline shared by every model in a cell.
struct NeuralSettings {
  EmbeddingHyper embedding;
  int max_neighbors = 5;
  ClassifierHyper classifier;
  int classifier_seeds = kDefaultClassifierSeeds;
};

// Everything metric evaluation needs beyond the data itself.
struct EvaluationSettings {
  NeuralSettings neural;
  ProbeOptions probe;
  int min_rec_count = kDefaultMinRecCount;
  // Report max(a, 1 - a) for the AUC metrics instead of the raw value.
  bool fold_auc = false;
};

struct ExperimentConfig {
  DatasetSource dataset;
  std::vector<ModelSpec> models;
  int k = 40;
  std::vector<std::string> metrics;
  int replications = 5;
  double test_ratio = 0.2;
  std::optional<SweepSpec> sweep;
  // One dataset for the whole experiment; replications only reseed the models.
  bool fixed_dataset = false;
  std::uint64_t seed = 0;
  int workers = 1;
  std::filesystem::path output_dir;
  EvaluationSettings evaluation;

  void validate() const;
};

// Parameters a sweep may bind. Generator fields need a generated dataset;
// fairness_weight rebinds every latent model.
const std::vector<std::string>& sweepable_parameters();

// Marker stored in MetricReport::error for metrics that do not apply to a
// model (representation_auc of a baseline). Such rows are not failures.
inline constexpr const char* kNotApplicable = "not applicable";

bool is_failure(const MetricReport& row);

struct AggregateRow {
  std::string dataset_id;
  std::string model;
  std::string metric;
  int k = 0;
  int count = 0;   // finite replications
  int failed = 0;  // error rows
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single value
};

struct SweepResult {
  std::vector<MetricReport> rows;
  std::vector<AggregateRow> aggregates;

  bool has_failures() const;
};

// Cell identifier "<parameter>=<value>", or "base" without a sweep.
std::string dataset_id_for(const std::optional<SweepSpec>& sweep, double value);

std::vector<AggregateRow> aggregate(const std::vector<MetricReport>& rows);

SweepResult run_experiment(const ExperimentConfig& config);

// Wrappers that bind the sweep parameter and fill the default grid when the
// config carries no values for it.
SweepResult sweep_epsilon(ExperimentConfig config);
SweepResult sweep_users(ExperimentConfig config);
SweepResult sweep_minority(ExperimentConfig config);
SweepResult sweep_fairness(ExperimentConfig config);

std::vector<double> default_grid(const std::string& parameter);

// report.csv, aggregate.csv and errors.tsv under `dir`.
void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);
void write_aggregate_csv(const std::filesystem::path& path, const std::vector<AggregateRow>& rows);

// Metric evaluation for one model on one split. Missing optional inputs make
// the dependent metrics fail with a message instead of throwing.
struct EvaluationInputs {
  const InteractionDataset* train = nullptr;
  const InteractionDataset* test = nullptr;
  const RecommendationTable* train_recs = nullptr;  // needed by neural_auc
  const RecommendationTable* test_recs = nullptr;
  const LatentModel* latent = nullptr;  // needed by representation_auc
  std::shared_ptr<const EmbeddingTable> embeddings;  // built from train if null
  double reference_minority_ratio = -1.0;  // train+test ratio if negative
};

struct MetricOutcome {
  std::string metric;
  double value = 0.0;
  std::string error;
};

std::vector<MetricOutcome> evaluate_metrics(const EvaluationInputs& inputs,
                                            const std::vector<std::string>& metrics, int k,
                                            const EvaluationSettings& settings,
                                            const SeedSpec& seed);

std::shared_ptr<const EmbeddingTable> train_cell_embeddings(const InteractionDataset& train,
                                                            const NeuralSettings& neural,
                                                            const SeedSpec& seed);

}  // namespace fairrec

#endif  // FAIRREC_HARNESS_EXPERIMENT_HPP_
