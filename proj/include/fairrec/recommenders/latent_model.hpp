#ifndef FAIRREC_RECOMMENDERS_LATENT_MODEL_HPP_
#define FAIRREC_RECOMMENDERS_LATENT_MODEL_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fairrec/core/dataset.hpp"
#include "fairrec/core/random.hpp"
#include "fairrec/metrics/probe.hpp"

namespace fairrec {

// How the adversary's signal enters the encoder. kReverse descends
// -fairness_weight * adversary loss; kConfusion descends
// fairness_weight * confusion_scale * cross-entropy of the adversary against
// the uninformative target 1/2.
enum class AdversaryObjective { kReverse, kConfusion };

std::string to_string(AdversaryObjective o);
AdversaryObjective adversary_objective_from_string(const std::string& s);

struct LatentHyper {
  int latent_dim = 64;
  int epochs = 20;
  int batch_size = 64;
  double learning_rate = 5e-3;
  // Probability of masking each interacted item out of the input.
  double dropout = 0.5;
  double adversary_learning_rate = 1e-2;
  int adversary_steps = 1;  // adversary updates per mini-batch
  // Scale of the adversary term in the encoder objective.
  double fairness_weight = 0.0;
  AdversaryObjective adversary_objective = AdversaryObjective::kConfusion;
  // The confusion gradient is an order of magnitude stronger than the
  // reversal one at the same weight; this keeps useful weights around 0.5-8.
  double confusion_scale = 0.1;
  // When false no adversary is trained or consulted at all.
  bool adversary_enabled = true;

  void validate() const;
  friend bool operator==(const LatentHyper&, const LatentHyper&) = default;
};

// One-hidden-layer denoising autoencoder over item-incidence vectors:
//   h = tanh(W_enc x + b_enc),  scores = W_dec h + b_dec,
// plus a logistic adversary sigmoid(w_adv . h + b_adv) predicting the
// demographic label from h. Inputs are scaled by 1/sqrt(#items present).
struct LatentModel {
  LatentHyper hyper;
  std::uint64_t seed = 0;
  int num_items = 0;

  Eigen::MatrixXd encoder_weights;  // d x I
  Eigen::VectorXd encoder_bias;     // d
  Eigen::MatrixXd decoder_weights;  // I x d
  Eigen::VectorXd decoder_bias;     // I
  Eigen::VectorXd adversary_weights;  // d
  double adversary_bias = 0.0;

  // Mean training reconstruction / adversary loss per epoch.
  std::vector<double> reconstruction_history;
  std::vector<double> adversary_history;

  int latent_dim() const { return static_cast<int>(encoder_bias.size()); }
};

// Gradient with the same layout as the model parameters.
struct LatentGradients {
  Eigen::MatrixXd encoder_weights;
  Eigen::VectorXd encoder_bias;
  Eigen::MatrixXd decoder_weights;
  Eigen::VectorXd decoder_bias;
  Eigen::VectorXd adversary_weights;
  double adversary_bias = 0.0;

  static LatentGradients zeros_like(const LatentModel& model);
};

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Model input for a list of (possibly masked) item sets.
SparseRows encode_inputs(std::span<const std::vector<int>> item_sets, int num_items);
SparseRows encode_inputs(const InteractionDataset& dataset);

// Mean multinomial cross-entropy of the target items (rows with no targets
// are skipped); fills the gradient w.r.t. encoder and decoder parameters.
double reconstruction_loss(const LatentModel& model, const SparseRows& inputs,
                           std::span<const std::vector<int>> targets, LatentGradients* grad);

// Mean binary cross-entropy of the adversary; fills the gradient w.r.t.
// encoder and adversary parameters (not reversed).
double adversary_loss(const LatentModel& model, const SparseRows& inputs,
                      std::span<const int> labels, LatentGradients* grad);

// Mean cross-entropy of the adversary's prediction against target 1/2 for
// every user; fills the gradient w.r.t. encoder parameters only.
double adversary_confusion_loss(const LatentModel& model, const SparseRows& inputs,
                                LatentGradients* grad);

LatentModel init_latent_model(int num_items, const LatentHyper& hyper, const SeedSpec& seed);

// Mini-batch Adam. Decoder and adversary descend their own losses; the
// encoder descends reconstruction loss plus the weighted adversary term
// chosen by adversary_objective. Throws TrainingError("diverged ...")
// on a non-finite loss.
LatentModel train_latent(const InteractionDataset& train, const LatentHyper& hyper,
                         const SeedSpec& seed);

// Encoder output for each user's full interaction vector, no masking.
RepresentationMatrix latent_representations(const LatentModel& model,
                                            const InteractionDataset& dataset,
                                            std::span<const int> users = {});

Eigen::VectorXd latent_scores(const LatentModel& model, std::span<const int> user_history);

// Top-k decoder scores over non-history items, index tie-break.
std::vector<int> latent_recommend(const LatentModel& model, std::span<const int> user_history,
                                  int k);
RecommendationTable latent_recommend_all(const LatentModel& model, const InteractionDataset& users,
                                         int k);

}  // namespace fairrec

#endif  // FAIRREC_RECOMMENDERS_LATENT_MODEL_HPP_
