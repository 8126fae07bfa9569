#include "fairrec/harness/experiment.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "fairrec/core/error.hpp"
#include "fairrec/core/io.hpp"
#include "fairrec/core/split.hpp"
#include "fairrec/datagen/generator.hpp"
#include "fairrec/metrics/auc.hpp"
#include "fairrec/metrics/demographic_ratio.hpp"
#include "fairrec/recommenders/baselines.hpp"

namespace fairrec {

namespace {

const std::map<std::string, ModelKind>& model_kind_names() {
  static const std::map<std::string, ModelKind> names = {
      {"pop", ModelKind::kPop},
      {"rand", ModelKind::kRand},
      {"dem_pop", ModelKind::kDemPop},
      {"max_division", ModelKind::kMaxDivision},
      {"latent", ModelKind::kLatent}};
  return names;
}

bool is_generator_parameter(const std::string& p) { return p != "fairness_weight"; }

int as_count(double v, const std::string& name) {
  if (v != std::floor(v)) throw ConfigError(name + " must be an integer, got " + format_value(v));
  return static_cast<int>(v);
}

void bind_parameter(const std::string& p, double v, GeneratorConfig* gen,
                    std::vector<ModelSpec>* models) {
  if (p == "fairness_weight") {
    for (auto& m : *models) {
      if (m.kind == ModelKind::kLatent) m.latent.fairness_weight = v;
    }
    return;
  }
  if (gen == nullptr) throw ConfigError("cannot sweep " + p + " over an ingested dataset");
  if (p == "epsilon") gen->epsilon = v;
  else if (p == "delta") gen->delta = v;
  else if (p == "minority_ratio") gen->minority_ratio = v;
  else if (p == "in_category_alpha") gen->in_category_alpha = v;
  else if (p == "n_users") gen->n_users = as_count(v, p);
  else if (p == "n_items") gen->n_items = as_count(v, p);
  else if (p == "tau") gen->tau = as_count(v, p);
  else if (p == "item_pop_mu") gen->item_pop_params.mu = v;
  else if (p == "item_pop_sigma") gen->item_pop_params.sigma = v;
  else if (p == "user_count_mu") gen->user_count_params.mu = v;
  else if (p == "user_count_sigma") gen->user_count_params.sigma = v;
  else throw ConfigError("unknown sweep parameter '" + p + "'");
}

struct Cell {
  std::size_t value_index;
  int replication;
};

struct SharedData {
  InteractionDataset dataset;
  std::optional<DatasetSplit> split;  // only when the split is shared too
};

class Runner {
 public:
  explicit Runner(const ExperimentConfig& config) : config_(config) {
    values_ = config.sweep ? config.sweep->values : std::vector<double>{0.0};
    const SeedSpec master(config.seed);
    if (config.dataset.ingest) {
      shared_ = load_shared(SeedSpec(config.seed));
    } else if (config.fixed_dataset) {
      shared_ = load_shared(master.derive("dataset"));
    }
  }

  std::vector<MetricReport> run() {
    std::vector<Cell> cells;
    for (std::size_t v = 0; v < values_.size(); ++v) {
      for (int r = 0; r < config_.replications; ++r) cells.push_back({v, r});
    }
    std::vector<std::vector<MetricReport>> out(cells.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) out[i] = run_cell(cells[i]);
    };
    const int n_threads = std::min<int>(config_.workers, static_cast<int>(cells.size()));
    if (n_threads <= 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    }
    std::vector<MetricReport> rows;
    for (auto& block : out) rows.insert(rows.end(), block.begin(), block.end());
    return rows;
  }

 private:
  // Loading failures are kept and replayed as error rows in every cell.
  struct SharedOrError {
    std::optional<SharedData> data;
    std::string error;
  };

  SharedOrError load_shared(const SeedSpec& data_seed) const {
    SharedOrError s;
    try {
      SharedData d;
      if (config_.dataset.ingest) {
        d.dataset = read_dataset_dir(*config_.dataset.ingest);
      } else {
        d.dataset = generate_dataset(*config_.dataset.generate, data_seed.derive("generate"));
        d.split = split_by_user(d.dataset, config_.test_ratio, data_seed);
      }
      s.data = std::move(d);
    } catch (const std::exception& e) {
      s.error = e.what();
    }
    return s;
  }

  std::vector<MetricReport> run_cell(const Cell& cell) const {
    const double value = values_[cell.value_index];
    const std::string id = dataset_id_for(config_.sweep, value);
    const SeedSpec master(config_.seed);
    const SeedSpec data_seed =
        master.derive("dataset").derive_value(value).derive(std::uint64_t(cell.replication));
    const SeedSpec model_root =
        config_.fixed_dataset
            ? master.derive("models").derive(std::uint64_t(cell.replication))
            : master.derive("models").derive_value(value).derive(std::uint64_t(cell.replication));

    std::vector<ModelSpec> models = config_.models;
    std::optional<GeneratorConfig> gen = config_.dataset.generate;
    if (config_.sweep) {
      bind_parameter(config_.sweep->parameter, value, gen ? &*gen : nullptr, &models);
    }

    std::vector<MetricReport> rows;
    auto emit_all = [&](const ModelSpec& m, const std::string& error) {
      for (const auto& metric : config_.metrics) {
        rows.push_back({id, m.id, metric, config_.k, model_root.derive(m.id).value(),
                        cell.replication, std::nan(""), error});
      }
    };

    // Dataset and split for this cell.
    InteractionDataset owned;
    std::optional<DatasetSplit> split;
    const InteractionDataset* dataset = nullptr;
    try {
      if (shared_) {
        if (!shared_->data) throw DataError(shared_->error);
        dataset = &shared_->data->dataset;
        split = shared_->data->split;
      } else {
        owned = generate_dataset(*gen, data_seed.derive("generate"));
        dataset = &owned;
      }
      if (!split) split = split_by_user(*dataset, config_.test_ratio, data_seed);
    } catch (const std::exception& e) {
      for (const auto& m : models) emit_all(m, e.what());
      return rows;
    }
    const double reference = minority_ratio(*dataset);

    std::shared_ptr<const EmbeddingTable> embeddings;
    std::string embedding_error;
    if (std::find(config_.metrics.begin(), config_.metrics.end(), metric_names::kNeuralAuc) !=
        config_.metrics.end()) {
      try {
        embeddings = train_cell_embeddings(split->train, config_.evaluation.neural,
                                           model_root.derive("embeddings"));
      } catch (const std::exception& e) {
        embedding_error = std::string("embeddings: ") + e.what();
      }
    }

    for (const auto& m : models) {
      const SeedSpec seed = model_root.derive(m.id);
      RecommendationTable train_recs, test_recs;
      std::optional<LatentModel> latent;
      try {
        if (m.kind == ModelKind::kLatent) {
          latent = train_latent(split->train, m.latent, seed.derive("train"));
          train_recs = latent_recommend_all(*latent, split->train, config_.k);
          test_recs = latent_recommend_all(*latent, split->test, config_.k);
        } else {
          const BaselineKind kind = m.kind == ModelKind::kPop      ? BaselineKind::kPop
                                    : m.kind == ModelKind::kRand     ? BaselineKind::kRand
                                    : m.kind == ModelKind::kDemPop   ? BaselineKind::kDemPop
                                                                     : BaselineKind::kMaxDivision;
          train_recs = recommend_baseline(kind, split->train, split->train, config_.k, seed,
                                          split->train_users);
          test_recs = recommend_baseline(kind, split->train, split->test, config_.k, seed,
                                         split->test_users);
        }
      } catch (const std::exception& e) {
        emit_all(m, e.what());
        continue;
      }
      EvaluationInputs in;
      in.train = &split->train;
      in.test = &split->test;
      in.train_recs = &train_recs;
      in.test_recs = &test_recs;
      in.latent = latent ? &*latent : nullptr;
      in.embeddings = embeddings;
      in.reference_minority_ratio = reference;
      auto outcomes = evaluate_metrics(in, config_.metrics, config_.k, config_.evaluation,
                                       seed.derive("metrics"));
      for (auto& o : outcomes) {
        if (o.metric == metric_names::kNeuralAuc && !embedding_error.empty()) {
          o.error = embedding_error;
          o.value = std::nan("");
        }
        rows.push_back({id, m.id, o.metric, config_.k, seed.value(), cell.replication, o.value,
                        o.error});
      }
    }
    return rows;
  }

  const ExperimentConfig& config_;
  std::vector<double> values_;
  std::optional<SharedOrError> shared_;
};

}  // namespace

std::string to_string(ModelKind kind) {
  for (const auto& [name, k] : model_kind_names()) {
    if (k == kind) return name;
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& s) {
  const auto it = model_kind_names().find(s);
  if (it == model_kind_names().end()) {
    throw ConfigError("unknown model type '" + s +
                      "' (expected pop, rand, dem_pop, max_division or latent)");
  }
  return it->second;
}

const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> names = {
      "epsilon",     "delta",          "minority_ratio", "in_category_alpha",
      "n_users",     "n_items",        "tau",            "item_pop_mu",
      "item_pop_sigma", "user_count_mu", "user_count_sigma", "fairness_weight"};
  return names;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("experiment config: " + msg); };
  if (k < 1) fail("k must be at least 1");
  if (replications < 1) fail("replications must be at least 1");
  if (!(test_ratio > 0.0 && test_ratio < 1.0)) fail("test_ratio must lie in (0, 1)");
  if (workers < 1) fail("workers must be at least 1");
  if (evaluation.min_rec_count < 1) fail("min_rec_count must be at least 1");
  if (dataset.generate.has_value() == dataset.ingest.has_value()) {
    fail("dataset needs exactly one of 'generate' or 'ingest'");
  }
  if (dataset.generate) dataset.generate->validate();
  if (models.empty()) fail("no models");
  std::set<std::string> ids;
  for (const auto& m : models) {
    if (m.id.empty()) fail("model id must be nonempty");
    if (m.id.find_first_of(",\"\n") != std::string::npos) fail("model id '" + m.id + "' contains ',', '\"' or a newline");
    if (!ids.insert(m.id).second) fail("duplicate model id '" + m.id + "'");
    if (m.kind == ModelKind::kLatent) m.latent.validate();
  }
  if (metrics.empty()) fail("no metrics");
  std::set<std::string> seen;
  for (const auto& name : metrics) {
    if (!is_known_metric(name)) fail("unknown metric '" + name + "'");
    if (!seen.insert(name).second) fail("duplicate metric '" + name + "'");
  }
  if (evaluation.neural.max_neighbors < 1) fail("neural.max_neighbors must be at least 1");
  if (evaluation.neural.classifier_seeds < 1) fail("neural.classifier_seeds must be at least 1");
  if (evaluation.probe.l2_grid.empty()) fail("probe.l2_grid must be nonempty");
  if (evaluation.probe.probe_seeds < 1) fail("probe.probe_seeds must be at least 1");
  if (sweep) {
    const auto& names = sweepable_parameters();
    if (std::find(names.begin(), names.end(), sweep->parameter) == names.end()) {
      fail("sweep parameter '" + sweep->parameter + "' is not a configurable field");
    }
    if (sweep->values.empty()) fail("sweep grid is empty");
    if (is_generator_parameter(sweep->parameter)) {
      if (dataset.ingest) fail("cannot sweep " + sweep->parameter + " over an ingested dataset");
      if (fixed_dataset) fail("fixed_dataset cannot be combined with a generator sweep");
    }
    // Every grid point must yield a valid configuration before any work starts.
    for (double v : sweep->values) {
      if (!std::isfinite(v)) fail("sweep values must be finite");
      std::optional<GeneratorConfig> gen = dataset.generate;
      std::vector<ModelSpec> bound = models;
      bind_parameter(sweep->parameter, v, gen ? &*gen : nullptr, &bound);
      if (gen) gen->validate();
      for (const auto& m : bound) {
        if (m.kind == ModelKind::kLatent) m.latent.validate();
      }
    }
  }
}

bool is_failure(const MetricReport& row) {
  return !row.error.empty() && row.error != kNotApplicable;
}

bool SweepResult::has_failures() const {
  return std::any_of(rows.begin(), rows.end(), is_failure);
}

std::string dataset_id_for(const std::optional<SweepSpec>& sweep, double value) {
  if (!sweep) return "base";
  return sweep->parameter + "=" + format_value(value);
}

std::vector<AggregateRow> aggregate(const std::vector<MetricReport>& rows) {
  std::vector<AggregateRow> out;
  std::map<std::tuple<std::string, std::string, std::string, int>, std::size_t> index;
  std::vector<std::vector<double>> samples;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.dataset_id, r.model, r.metric, r.k);
    auto [it, inserted] = index.emplace(key, out.size());
    if (inserted) {
      out.push_back({r.dataset_id, r.model, r.metric, r.k, 0, 0, 0.0, 0.0});
      samples.emplace_back();
    }
    if (is_failure(r)) ++out[it->second].failed;
    else if (std::isfinite(r.value)) samples[it->second].push_back(r.value);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& s = samples[i];
    out[i].count = static_cast<int>(s.size());
    if (s.empty()) {
      out[i].mean = out[i].stddev = std::nan("");
      continue;
    }
    double sum = 0.0;
    for (double x : s) sum += x;
    const double mean = sum / static_cast<double>(s.size());
    double ss = 0.0;
    for (double x : s) ss += (x - mean) * (x - mean);
    out[i].mean = mean;
    out[i].stddev = s.size() > 1 ? std::sqrt(ss / static_cast<double>(s.size() - 1)) : 0.0;
  }
  return out;
}

SweepResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  SweepResult result;
  result.rows = Runner(config).run();
  result.aggregates = aggregate(result.rows);
  return result;
}

std::vector<double> default_grid(const std::string& parameter) {
  if (parameter == "epsilon") {
    std::vector<double> g;
    for (int i = 1; i <= 50; ++i) g.push_back(i / 50.0);
    return g;
  }
  if (parameter == "n_users") return {500, 1000, 2000, 3000, 4000};
  if (parameter == "minority_ratio") return {0.1, 0.2, 0.3, 0.4, 0.5};
  if (parameter == "fairness_weight") return {0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
  throw ConfigError("no default grid for sweep parameter '" + parameter + "'");
}

namespace {

SweepResult bound_sweep(ExperimentConfig config, const std::string& parameter) {
  if (!config.sweep || config.sweep->parameter != parameter || config.sweep->values.empty()) {
    config.sweep = SweepSpec{parameter, default_grid(parameter)};
  }
  return run_experiment(config);
}

}  // namespace

SweepResult sweep_epsilon(ExperimentConfig config) { return bound_sweep(std::move(config), "epsilon"); }
SweepResult sweep_users(ExperimentConfig config) { return bound_sweep(std::move(config), "n_users"); }
SweepResult sweep_minority(ExperimentConfig config) {
  return bound_sweep(std::move(config), "minority_ratio");
}
SweepResult sweep_fairness(ExperimentConfig config) {
  return bound_sweep(std::move(config), "fairness_weight");
}

void write_aggregate_csv(const std::filesystem::path& path, const std::vector<AggregateRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "dataset_id,model,metric,k,count,failed,mean,std\n";
  for (const auto& r : rows) {
    out << r.dataset_id << ',' << r.model << ',' << r.metric << ',' << r.k << ',' << r.count << ','
        << r.failed << ',' << format_value(r.mean) << ',' << format_value(r.stddev) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_report_csv(dir / "report.csv", result.rows);
  write_aggregate_csv(dir / "aggregate.csv", result.aggregates);
  std::ofstream err(dir / "errors.tsv");
  if (!err) throw IoError("cannot write " + (dir / "errors.tsv").string());
  for (const auto& r : result.rows) {
    if (!is_failure(r)) continue;
    std::string msg = r.error;
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::replace(msg.begin(), msg.end(), '\t', ' ');
    err << r.dataset_id << '\t' << r.model << '\t' << r.metric << '\t' << r.replication << '\t'
        << msg << '\n';
  }
}

std::shared_ptr<const EmbeddingTable> train_cell_embeddings(const InteractionDataset& train,
                                                            const NeuralSettings& neural,
                                                            const SeedSpec& seed) {
  const auto pairs = sample_skipgram_pairs(train, neural.max_neighbors, seed.derive("pairs"));
  return std::make_shared<const EmbeddingTable>(
      train_item_embeddings(pairs, train.num_items(), neural.embedding, seed.derive("sgns")));
}

std::vector<MetricOutcome> evaluate_metrics(const EvaluationInputs& in,
                                            const std::vector<std::string>& metrics, int k,
                                            const EvaluationSettings& settings,
                                            const SeedSpec& seed) {
  const auto& neural = settings.neural;
  if (in.train == nullptr || in.test == nullptr || in.test_recs == nullptr) {
    throw ConfigError("evaluation needs train and test datasets and test recommendations");
  }
  const auto table = std::make_shared<const DemographicRatioTable>(demographic_ratio_table(*in.train));
  const auto test_labels = in.test->labels();
  std::vector<MetricOutcome> out;
  for (const auto& name : metrics) {
    MetricOutcome o{name, std::nan(""), ""};
    try {
      if (name == metric_names::kDemographicRatioAuc) {
        o.value = demographic_ratio_auc(*table, *in.test_recs, test_labels);
      } else if (name == metric_names::kNeuralAuc) {
        if (in.train_recs == nullptr) throw DataError("neural_auc needs train-user recommendations");
        auto embeddings = in.embeddings ? in.embeddings
                                        : train_cell_embeddings(*in.train, neural, seed.derive("embeddings"));
        auto encoder = std::make_shared<const MeanPoolEncoder>(embeddings, table);
        o.value = evaluate_neural_auc(encoder, *in.train_recs, in.train->labels(), *in.test_recs,
                                      test_labels, neural.classifier, seed.derive("neural"),
                                      neural.classifier_seeds);
      } else if (name == metric_names::kItemRatio) {
        double reference = in.reference_minority_ratio;
        if (reference < 0.0) {
          const double n_train = in.train->num_users(), n_test = in.test->num_users();
          reference = (in.train->group_size(kMinority) + in.test->group_size(kMinority)) /
                      (n_train + n_test);
        }
        o.value = item_ratio(*in.test_recs, test_labels, reference, settings.min_rec_count);
      } else if (name == metric_names::kKendallTau) {
        o.value = group_kendall_tau(*in.test_recs, test_labels, k);
      } else if (name == metric_names::kRepresentationAuc) {
        if (in.latent == nullptr) {
          o.error = kNotApplicable;
        } else {
          const auto reps_train = latent_representations(*in.latent, *in.train);
          const auto reps_test = latent_representations(*in.latent, *in.test);
          o.value = representation_auc(reps_train, in.train->labels(), reps_test, test_labels,
                                       settings.probe, seed.derive("probe"));
        }
      } else {
        throw ConfigError("unknown metric '" + name + "'");
      }
      const bool is_auc = name != metric_names::kItemRatio && name != metric_names::kKendallTau;
      if (settings.fold_auc && is_auc && o.error.empty()) o.value = fold_auc(o.value);
    } catch (const std::exception& e) {
      o.value = std::nan("");
      o.error = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace fairrec
