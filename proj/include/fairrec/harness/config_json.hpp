#ifndef FAIRREC_HARNESS_CONFIG_JSON_HPP_
#define FAIRREC_HARNESS_CONFIG_JSON_HPP_

#include <filesystem>

#include <nlohmann/json.hpp>

#include "fairrec/harness/experiment.hpp"

namespace fairrec {

// Experiment configuration file. Unknown keys are rejected; omitted keys take
// the ExperimentConfig defaults, except that "models" defaults to the four
// baselines plus an unconstrained latent model and "metrics" to all five.
//
// {
//   "dataset": {"generate": {...generator fields...}} | {"ingest": "<dir>"},
//   "models": ["pop", {"id": "latent_l2", "type": "latent", "fairness_weight": 2}],
//   "k": 40, "metrics": [...], "replications": 5, "test_ratio": 0.2,
//   "sweep": {"parameter": "epsilon", "values": [0.02, 0.5, 1.0]},
//   "fixed_dataset": false, "seed": 1, "workers": 1, "output_dir": "out",
//   "neural": {...}, "probe": {...}, "min_rec_count": 5
// }
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

ModelSpec model_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ModelSpec& model);
nlohmann::json to_json(const LatentHyper& hyper);
LatentHyper latent_hyper_from_json(const nlohmann::json& j, LatentHyper base = {});

std::vector<ModelSpec> default_models();
std::vector<std::string> default_metrics();

}  // namespace fairrec

#endif  // FAIRREC_HARNESS_CONFIG_JSON_HPP_
