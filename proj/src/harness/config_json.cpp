#include "fairrec/harness/config_json.hpp"

#include <fstream>
#include <set>

#include "fairrec/core/error.hpp"

namespace fairrec {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

template <typename T>
void read_into(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

NeuralSettings neural_from_json(const json& j) {
  reject_unknown(j,
                 {"embedding_dim", "negatives", "embedding_epochs", "embedding_learning_rate",
                  "unigram_power", "max_neighbors", "hidden", "learning_rate", "weight_decay",
                  "max_epochs", "patience", "validation_fraction", "classifier_seeds"},
                 "neural");
  NeuralSettings n;
  read_into(j, "embedding_dim", n.embedding.dim);
  read_into(j, "negatives", n.embedding.negatives);
  read_into(j, "embedding_epochs", n.embedding.epochs);
  read_into(j, "embedding_learning_rate", n.embedding.learning_rate);
  read_into(j, "unigram_power", n.embedding.unigram_power);
  read_into(j, "max_neighbors", n.max_neighbors);
  read_into(j, "hidden", n.classifier.hidden);
  read_into(j, "learning_rate", n.classifier.learning_rate);
  read_into(j, "weight_decay", n.classifier.weight_decay);
  read_into(j, "max_epochs", n.classifier.max_epochs);
  read_into(j, "patience", n.classifier.patience);
  read_into(j, "validation_fraction", n.classifier.validation_fraction);
  read_into(j, "classifier_seeds", n.classifier_seeds);
  return n;
}

json to_json(const NeuralSettings& n) {
  return {{"embedding_dim", n.embedding.dim},
          {"negatives", n.embedding.negatives},
          {"embedding_epochs", n.embedding.epochs},
          {"embedding_learning_rate", n.embedding.learning_rate},
          {"unigram_power", n.embedding.unigram_power},
          {"max_neighbors", n.max_neighbors},
          {"hidden", n.classifier.hidden},
          {"learning_rate", n.classifier.learning_rate},
          {"weight_decay", n.classifier.weight_decay},
          {"max_epochs", n.classifier.max_epochs},
          {"patience", n.classifier.patience},
          {"validation_fraction", n.classifier.validation_fraction},
          {"classifier_seeds", n.classifier_seeds}};
}

ProbeOptions probe_from_json(const json& j) {
  reject_unknown(j, {"l2_grid", "validation_fraction", "probe_seeds", "max_iterations"}, "probe");
  ProbeOptions p;
  read_into(j, "l2_grid", p.l2_grid);
  read_into(j, "validation_fraction", p.validation_fraction);
  read_into(j, "probe_seeds", p.probe_seeds);
  read_into(j, "max_iterations", p.max_iterations);
  return p;
}

json to_json(const ProbeOptions& p) {
  return {{"l2_grid", p.l2_grid},
          {"validation_fraction", p.validation_fraction},
          {"probe_seeds", p.probe_seeds},
          {"max_iterations", p.max_iterations}};
}

}  // namespace

LatentHyper latent_hyper_from_json(const json& j, LatentHyper h) {
  read_into(j, "latent_dim", h.latent_dim);
  read_into(j, "epochs", h.epochs);
  read_into(j, "batch_size", h.batch_size);
  read_into(j, "learning_rate", h.learning_rate);
  read_into(j, "dropout", h.dropout);
  read_into(j, "adversary_learning_rate", h.adversary_learning_rate);
  read_into(j, "adversary_steps", h.adversary_steps);
  if (j.contains("adversary_objective")) {
    h.adversary_objective = adversary_objective_from_string(j.at("adversary_objective").get<std::string>());
  }
  read_into(j, "confusion_scale", h.confusion_scale);
  read_into(j, "fairness_weight", h.fairness_weight);
  read_into(j, "adversary_enabled", h.adversary_enabled);
  return h;
}

json to_json(const LatentHyper& h) {
  return {{"latent_dim", h.latent_dim},
          {"epochs", h.epochs},
          {"batch_size", h.batch_size},
          {"learning_rate", h.learning_rate},
          {"dropout", h.dropout},
          {"adversary_learning_rate", h.adversary_learning_rate},
          {"adversary_steps", h.adversary_steps},
          {"adversary_objective", to_string(h.adversary_objective)},
          {"confusion_scale", h.confusion_scale},
          {"fairness_weight", h.fairness_weight},
          {"adversary_enabled", h.adversary_enabled}};
}

ModelSpec model_spec_from_json(const json& j) {
  ModelSpec m;
  if (j.is_string()) {
    m.kind = model_kind_from_string(j.get<std::string>());
    m.id = j.get<std::string>();
    return m;
  }
  reject_unknown(j,
                 {"id", "type", "latent_dim", "epochs", "batch_size", "learning_rate", "dropout",
                  "adversary_learning_rate", "adversary_steps", "adversary_objective", "confusion_scale",
                  "fairness_weight",
                  "adversary_enabled"},
                 "model");
  if (!j.contains("type")) throw ConfigError("model: missing 'type'");
  m.kind = model_kind_from_string(j.at("type").get<std::string>());
  m.id = j.value("id", j.at("type").get<std::string>());
  if (m.kind == ModelKind::kLatent) {
    m.latent = latent_hyper_from_json(j);
  } else if (j.size() > (j.contains("id") ? 2u : 1u)) {
    throw ConfigError("model '" + m.id + "': baselines take no hyperparameters");
  }
  return m;
}

json to_json(const ModelSpec& m) {
  json j = {{"id", m.id}, {"type", to_string(m.kind)}};
  if (m.kind == ModelKind::kLatent) j.update(to_json(m.latent));
  return j;
}

std::vector<ModelSpec> default_models() {
  std::vector<ModelSpec> models;
  for (const char* name : {"pop", "rand", "dem_pop", "max_division", "latent"}) {
    models.push_back({name, model_kind_from_string(name), {}});
  }
  return models;
}

std::vector<std::string> default_metrics() {
  return {metric_names::kDemographicRatioAuc, metric_names::kNeuralAuc, metric_names::kItemRatio,
          metric_names::kKendallTau, metric_names::kRepresentationAuc};
}

ExperimentConfig experiment_config_from_json(const json& j) {
  reject_unknown(j,
                 {"dataset", "models", "k", "metrics", "replications", "test_ratio", "sweep",
                  "fixed_dataset", "seed", "workers", "output_dir", "neural", "probe",
                  "min_rec_count", "fold_auc"},
                 "experiment config");
  ExperimentConfig c;
  try {
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      reject_unknown(d, {"generate", "ingest"}, "dataset");
      if (d.contains("generate")) c.dataset.generate = generator_config_from_json(d.at("generate"));
      if (d.contains("ingest")) c.dataset.ingest = d.at("ingest").get<std::string>();
    } else {
      c.dataset.generate = GeneratorConfig{};
    }
    if (j.contains("models")) {
      for (const auto& m : j.at("models")) c.models.push_back(model_spec_from_json(m));
    } else {
      c.models = default_models();
    }
    c.metrics = j.contains("metrics") ? j.at("metrics").get<std::vector<std::string>>()
                                      : default_metrics();
    read_into(j, "k", c.k);
    read_into(j, "replications", c.replications);
    read_into(j, "test_ratio", c.test_ratio);
    read_into(j, "fixed_dataset", c.fixed_dataset);
    read_into(j, "seed", c.seed);
    read_into(j, "workers", c.workers);
    read_into(j, "min_rec_count", c.evaluation.min_rec_count);
    read_into(j, "fold_auc", c.evaluation.fold_auc);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      reject_unknown(s, {"parameter", "values"}, "sweep");
      SweepSpec spec;
      spec.parameter = s.at("parameter").get<std::string>();
      read_into(s, "values", spec.values);
      if (spec.values.empty()) spec.values = default_grid(spec.parameter);
      c.sweep = spec;
    }
    if (j.contains("neural")) c.evaluation.neural = neural_from_json(j.at("neural"));
    if (j.contains("probe")) c.evaluation.probe = probe_from_json(j.at("probe"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  if (c.dataset.generate) j["dataset"]["generate"] = to_json(*c.dataset.generate);
  if (c.dataset.ingest) j["dataset"]["ingest"] = c.dataset.ingest->string();
  j["models"] = json::array();
  for (const auto& m : c.models) j["models"].push_back(to_json(m));
  j["k"] = c.k;
  j["metrics"] = c.metrics;
  j["replications"] = c.replications;
  j["test_ratio"] = c.test_ratio;
  if (c.sweep) j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
  j["fixed_dataset"] = c.fixed_dataset;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  if (!c.output_dir.empty()) j["output_dir"] = c.output_dir.string();
  j["neural"] = to_json(c.evaluation.neural);
  j["probe"] = to_json(c.evaluation.probe);
  j["min_rec_count"] = c.evaluation.min_rec_count;
  j["fold_auc"] = c.evaluation.fold_auc;
  return j;
}

}  // namespace fairrec
