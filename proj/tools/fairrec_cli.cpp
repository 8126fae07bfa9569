// Command-line front end: dataset generation and ingestion, splitting,
// recommendation, latent-model training, evaluation and sweeps.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fairrec/core/error.hpp"
#include "fairrec/core/io.hpp"
#include "fairrec/core/split.hpp"
#include "fairrec/datagen/generator.hpp"
#include "fairrec/harness/config_json.hpp"
#include "fairrec/harness/experiment.hpp"
#include "fairrec/harness/movielens.hpp"
#include "fairrec/metrics/demographic_ratio.hpp"
#include "fairrec/neuralauc/serialize.hpp"
#include "fairrec/recommenders/baselines.hpp"
#include "fairrec/recommenders/model_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fairrec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;
constexpr int kExitIo = 3;

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
  int workers = 1;
  bool workers_given = false;
  std::string config;
};

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

fs::path require_out(const Globals& g, const char* what) {
  if (g.out.empty()) throw ConfigError(std::string("--out is required (") + what + ")");
  return g.out;
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--values: '" + item + "' is not a number");
    }
  }
  return values;
}

void write_user_index(const fs::path& path, const std::vector<int>& users) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (int u : users) out << u << '\n';
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::optional<int> n_users, n_items;
  std::optional<double> epsilon, delta, minority_ratio;
};

int run_generate(const Globals& g, const GenerateArgs& a) {
  GeneratorConfig config;
  if (!g.config.empty()) config = generator_config_from_json(read_json(g.config));
  if (a.n_users) config.n_users = *a.n_users;
  if (a.n_items) config.n_items = *a.n_items;
  if (a.epsilon) config.epsilon = *a.epsilon;
  if (a.delta) config.delta = *a.delta;
  if (a.minority_ratio) config.minority_ratio = *a.minority_ratio;
  config.validate();
  const fs::path out = require_out(g, "dataset directory");
  const auto dataset = generate_dataset(config, SeedSpec(g.seed));
  write_dataset_dir(dataset, out);
  write_json(out / "provenance.json",
             {{"provenance", to_string(Provenance::kSynthetic)},
              {"seed", g.seed},
              {"config", to_json(config)}});
  std::cout << "generated " << dataset.num_users() << " users, " << dataset.num_items()
            << " items, " << dataset.num_interactions() << " interactions (minority ratio "
            << format_value(minority_ratio(dataset)) << ") in " << out.string() << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------ ingest

struct IngestArgs {
  std::string ratings, users, attribute = "gender";
  int min_rating = 1;
  int age_threshold = 45;
};

int run_ingest(const Globals& g, const IngestArgs& a) {
  MovieLensOptions options;
  options.attribute = attribute_from_string(a.attribute);
  options.min_rating = a.min_rating;
  options.age_threshold = a.age_threshold;
  const fs::path out = require_out(g, "dataset directory");
  const auto ingested = ingest_movielens(a.ratings, a.users, options);
  write_ingested(ingested, options, out);
  std::cout << ingested.report.to_json(options).dump(2) << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------- split

struct SplitArgs {
  std::string data;
  double test_ratio = 0.2;
};

int run_split(const Globals& g, const SplitArgs& a) {
  const fs::path out = require_out(g, "split directory");
  const auto dataset = read_dataset_dir(a.data);
  const auto split = split_by_user(dataset, a.test_ratio, SeedSpec(g.seed));
  write_dataset_dir(split.train, out / "train");
  write_dataset_dir(split.test, out / "test");
  write_user_index(out / "train_users.tsv", split.train_users);
  write_user_index(out / "test_users.tsv", split.test_users);
  std::cout << "train " << split.train.num_users() << " users, test " << split.test.num_users()
            << " users\n";
  return kExitOk;
}

// --------------------------------------------------------------- recommend

struct RecommendArgs {
  std::string train, users, model = "pop", model_file;
  int k = 40;
};

int run_recommend(const Globals& g, const RecommendArgs& a) {
  const fs::path out = require_out(g, "recommendations file");
  const auto train = read_dataset_dir(a.train);
  const auto users = a.users.empty() ? train : read_dataset_dir(a.users);
  const ModelKind kind = model_kind_from_string(a.model);
  RecommendationTable recs;
  if (kind == ModelKind::kLatent) {
    if (a.model_file.empty()) throw ConfigError("--model latent needs --model-file");
    const auto model = load_latent_model(a.model_file);
    if (model.num_items != users.num_items()) {
      throw DataError("model has " + std::to_string(model.num_items) + " items, dataset has " +
                      std::to_string(users.num_items()));
    }
    recs = latent_recommend_all(model, users, a.k);
  } else {
    const BaselineKind b = kind == ModelKind::kPop      ? BaselineKind::kPop
                           : kind == ModelKind::kRand   ? BaselineKind::kRand
                           : kind == ModelKind::kDemPop ? BaselineKind::kDemPop
                                                        : BaselineKind::kMaxDivision;
    recs = recommend_baseline(b, train, users, a.k, SeedSpec(g.seed));
  }
  write_recommendations(recs, out);
  return kExitOk;
}

// ------------------------------------------------------------ train-latent

struct TrainLatentArgs {
  std::string train;
  std::optional<int> latent_dim, epochs, batch_size, adversary_steps;
  std::optional<double> fairness_weight, learning_rate, dropout, adversary_learning_rate;
  bool no_adversary = false;
};

int run_train_latent(const Globals& g, const TrainLatentArgs& a) {
  LatentHyper hyper;
  if (!g.config.empty()) {
    auto spec = read_json(g.config);
    spec["type"] = "latent";
    hyper = model_spec_from_json(spec).latent;
  }
  if (a.latent_dim) hyper.latent_dim = *a.latent_dim;
  if (a.epochs) hyper.epochs = *a.epochs;
  if (a.batch_size) hyper.batch_size = *a.batch_size;
  if (a.fairness_weight) hyper.fairness_weight = *a.fairness_weight;
  if (a.learning_rate) hyper.learning_rate = *a.learning_rate;
  if (a.dropout) hyper.dropout = *a.dropout;
  if (a.adversary_learning_rate) hyper.adversary_learning_rate = *a.adversary_learning_rate;
  if (a.adversary_steps) hyper.adversary_steps = *a.adversary_steps;
  if (a.no_adversary) hyper.adversary_enabled = false;
  hyper.validate();
  const fs::path out = require_out(g, "model file");
  const auto train = read_dataset_dir(a.train);
  const auto model = train_latent(train, hyper, SeedSpec(g.seed));
  save_latent_model(model, out);
  std::cout << "final reconstruction loss "
            << format_value(model.reconstruction_history.empty() ? std::nan("")
                                                                 : model.reconstruction_history.back())
            << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string train, test, recs, train_recs, model_file, model_name = "model";
  std::string metrics, dataset_id = "base", save_neural;
  std::optional<int> k;
  std::optional<double> reference_ratio;
  int min_rec_count = kDefaultMinRecCount;
  bool fold_auc = false;
};

int run_evaluate(const Globals& g, const EvaluateArgs& a) {
  const fs::path out = require_out(g, "output directory");
  const auto train = read_dataset_dir(a.train);
  const auto test = read_dataset_dir(a.test);
  const auto test_recs = read_recommendations(a.recs, test.num_users());
  validate_recommendations(test_recs, test);
  std::optional<RecommendationTable> train_recs;
  if (!a.train_recs.empty()) {
    train_recs = read_recommendations(a.train_recs, train.num_users());
    validate_recommendations(*train_recs, train);
  }
  std::optional<LatentModel> latent;
  if (!a.model_file.empty()) latent = load_latent_model(a.model_file);

  std::vector<std::string> metrics;
  if (a.metrics.empty()) {
    metrics = default_metrics();
  } else {
    std::stringstream ss(a.metrics);
    for (std::string m; std::getline(ss, m, ',');) {
      if (!is_known_metric(m)) throw ConfigError("unknown metric '" + m + "'");
      metrics.push_back(m);
    }
  }
  const int k = a.k.value_or(test_recs.k);
  EvaluationSettings settings;
  if (!g.config.empty()) {
    json j = read_json(g.config);
    settings = experiment_config_from_json(
                   json{{"neural", j.value("neural", json::object())},
                        {"probe", j.value("probe", json::object())}})
                   .evaluation;
  }
  settings.min_rec_count = a.min_rec_count;
  settings.fold_auc = a.fold_auc;
  const NeuralSettings& neural = settings.neural;
  const SeedSpec seed(g.seed);

  EvaluationInputs in;
  in.train = &train;
  in.test = &test;
  in.train_recs = train_recs ? &*train_recs : nullptr;
  in.test_recs = &test_recs;
  in.latent = latent ? &*latent : nullptr;
  in.reference_minority_ratio = a.reference_ratio.value_or(-1.0);
  if (!a.save_neural.empty()) {
    if (!train_recs) throw ConfigError("--save-neural needs --train-recs");
    in.embeddings = train_cell_embeddings(train, neural, seed.derive("embeddings"));
    auto table = std::make_shared<const DemographicRatioTable>(demographic_ratio_table(train));
    auto encoder = std::make_shared<const MeanPoolEncoder>(in.embeddings, table);
    const auto clf = train_list_classifier(encoder, *train_recs, train.labels(), neural.classifier,
                                           seed.derive("classifier"));
    save_embeddings(*in.embeddings, fs::path(a.save_neural) / "embeddings.bin");
    save_classifier(clf, fs::path(a.save_neural) / "classifier.bin");
  }

  const auto outcomes =
      evaluate_metrics(in, metrics, k, settings, seed.derive("metrics"));
  std::vector<MetricReport> rows;
  bool failed = false;
  for (const auto& o : outcomes) {
    rows.push_back({a.dataset_id, a.model_name, o.metric, k, g.seed, 0, o.value, o.error});
    if (is_failure(rows.back())) {
      failed = true;
      std::cerr << o.metric << ": " << o.error << '\n';
    }
  }
  write_sweep_outputs({rows, aggregate(rows)}, out);
  write_report_csv(std::cout, rows);
  return failed ? kExitPartial : kExitOk;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string parameter, values;
  std::optional<int> replications, k;
};

int run_sweep(const Globals& g, const SweepArgs& a) {
  ExperimentConfig config;
  json j = g.config.empty() ? json::object() : read_json(g.config);
  if (!a.parameter.empty()) {
    j["sweep"] = {{"parameter", a.parameter}};
    if (!a.values.empty()) j["sweep"]["values"] = parse_values(a.values);
  } else if (!a.values.empty()) {
    if (!j.contains("sweep")) throw ConfigError("--values needs --parameter or a sweep in the config");
    j["sweep"]["values"] = parse_values(a.values);
  }
  if (g.seed_given) j["seed"] = g.seed;
  if (g.workers_given) j["workers"] = g.workers;
  if (!g.out.empty()) j["output_dir"] = g.out;
  if (a.replications) j["replications"] = *a.replications;
  if (a.k) j["k"] = *a.k;
  config = experiment_config_from_json(j);
  if (config.output_dir.empty()) throw ConfigError("--out (or output_dir in the config) is required");

  const auto result = run_experiment(config);
  write_sweep_outputs(result, config.output_dir);
  write_json(config.output_dir / "config.json", to_json(config));
  std::size_t failures = 0;
  for (const auto& r : result.rows) failures += is_failure(r) ? 1 : 0;
  std::cout << result.rows.size() << " rows written to " << (config.output_dir / "report.csv").string();
  if (failures > 0) std::cout << " (" << failures << " failed, see errors.tsv)";
  std::cout << '\n';
  return failures > 0 ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness evaluation toolkit for top-k recommenders"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out", g.out, "Output file or directory");
  auto* workers_opt = app.add_option("--workers", g.workers, "Concurrent sweep cells")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "JSON configuration file");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset");
  generate->add_option("--n-users", gen.n_users);
  generate->add_option("--n-items", gen.n_items);
  generate->add_option("--epsilon", gen.epsilon);
  generate->add_option("--delta", gen.delta);
  generate->add_option("--minority-ratio", gen.minority_ratio);

  IngestArgs ing;
  auto* ingest = app.add_subcommand("ingest", "Ingest Movielens-1M style ratings and users files");
  ingest->add_option("--ratings", ing.ratings)->required();
  ingest->add_option("--users", ing.users)->required();
  ingest->add_option("--attribute", ing.attribute)->check(CLI::IsMember({"gender", "age"}));
  ingest->add_option("--min-rating", ing.min_rating, "Ratings below this are dropped");
  ingest->add_option("--age-threshold", ing.age_threshold, "Age code splitting the two groups");

  SplitArgs sp;
  auto* split = app.add_subcommand("split", "User-disjoint stratified train/test split");
  split->add_option("--data", sp.data)->required();
  split->add_option("--test-ratio", sp.test_ratio);

  RecommendArgs rec;
  auto* recommend = app.add_subcommand("recommend", "Write top-k recommendations");
  recommend->add_option("--train", rec.train)->required();
  recommend->add_option("--users", rec.users, "Users to recommend for (default: train users)");
  recommend->add_option("--model", rec.model)
      ->check(CLI::IsMember({"pop", "rand", "dem_pop", "max_division", "latent"}));
  recommend->add_option("--model-file", rec.model_file);
  recommend->add_option("--k", rec.k)->check(CLI::PositiveNumber);

  TrainLatentArgs tl;
  auto* train_latent_cmd = app.add_subcommand("train-latent", "Train the latent autoencoder");
  train_latent_cmd->add_option("--train", tl.train)->required();
  train_latent_cmd->add_option("--latent-dim", tl.latent_dim);
  train_latent_cmd->add_option("--fairness-weight", tl.fairness_weight);
  train_latent_cmd->add_option("--epochs", tl.epochs);
  train_latent_cmd->add_option("--batch-size", tl.batch_size);
  train_latent_cmd->add_option("--learning-rate", tl.learning_rate);
  train_latent_cmd->add_option("--dropout", tl.dropout);
  train_latent_cmd->add_option("--adversary-learning-rate", tl.adversary_learning_rate);
  train_latent_cmd->add_option("--adversary-steps", tl.adversary_steps);
  train_latent_cmd->add_flag("--no-adversary", tl.no_adversary);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Compute fairness metrics for one model");
  evaluate->add_option("--train", ev.train)->required();
  evaluate->add_option("--test", ev.test)->required();
  evaluate->add_option("--recs", ev.recs, "Test-user recommendations")->required();
  evaluate->add_option("--train-recs", ev.train_recs, "Train-user recommendations (neural_auc)");
  evaluate->add_option("--model-file", ev.model_file, "Latent model (representation_auc)");
  evaluate->add_option("--model-name", ev.model_name);
  evaluate->add_option("--dataset-id", ev.dataset_id);
  evaluate->add_option("--metrics", ev.metrics, "Comma-separated metric names");
  evaluate->add_option("--k", ev.k);
  evaluate->add_option("--reference-ratio", ev.reference_ratio);
  evaluate->add_option("--min-rec-count", ev.min_rec_count);
  evaluate->add_flag("--fold-auc", ev.fold_auc, "Report max(a, 1 - a) for AUC metrics");
  evaluate->add_option("--save-neural", ev.save_neural, "Directory for embeddings.bin and classifier.bin");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Run a replicated parameter sweep");
  sweep->add_option("--parameter", sw.parameter);
  sweep->add_option("--values", sw.values, "Comma-separated grid");
  sweep->add_option("--replications", sw.replications);
  sweep->add_option("--k", sw.k);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  g.seed_given = seed_opt->count() > 0;
  g.workers_given = workers_opt->count() > 0;

  try {
    if (*generate) return run_generate(g, gen);
    if (*ingest) return run_ingest(g, ing);
    if (*split) return run_split(g, sp);
    if (*recommend) return run_recommend(g, rec);
    if (*train_latent_cmd) return run_train_latent(g, tl);
    if (*evaluate) return run_evaluate(g, ev);
    if (*sweep) return run_sweep(g, sw);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
