#ifndef FAIRREC_NEURALAUC_LIST_CLASSIFIER_HPP_
#define FAIRREC_NEURALAUC_LIST_CLASSIFIER_HPP_

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fairrec/core/dataset.hpp"
#include "fairrec/core/random.hpp"
#include "fairrec/metrics/demographic_ratio.hpp"
#include "fairrec/metrics/probe.hpp"
#include "fairrec/neuralauc/skipgram.hpp"

namespace fairrec {

// Turns one recommendation list into a fixed-size feature vector. The
// classifier only sees lists through this interface.
class ListEncoder {
 public:
  virtual ~ListEncoder() = default;
  virtual int feature_dim() const = 0;
  virtual Eigen::VectorXd encode(std::span<const int> items) const = 0;
};

// Mean over the list of [embedding_i, demographic_ratio_i]. Items are summed
// in ascending index order, so the result ignores list order bit-for-bit.
class MeanPoolEncoder final : public ListEncoder {
 public:
  MeanPoolEncoder(std::shared_ptr<const EmbeddingTable> embeddings,
                  std::shared_ptr<const DemographicRatioTable> polarization);

  int feature_dim() const override;
  Eigen::VectorXd encode(std::span<const int> items) const override;

  const EmbeddingTable& embeddings() const { return *embeddings_; }

 private:
  std::shared_ptr<const EmbeddingTable> embeddings_;
  std::shared_ptr<const DemographicRatioTable> polarization_;
};

Eigen::MatrixXd encode_lists(const ListEncoder& encoder, const RecommendationTable& recs);

struct ClassifierHyper {
  int hidden = 32;
  double learning_rate = 1e-2;
  double weight_decay = 1e-4;
  int max_epochs = 400;
  int patience = 25;
  double validation_fraction = 0.2;
};

// Parameters of the feed-forward head: logit = w2 . tanh(W1 z + b1) + b2.
struct ClassifierParams {
  Eigen::MatrixXd w1;  // hidden x features
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;
  double b2 = 0.0;
};

// Mean logistic loss plus weight_decay/2 * (|W1|^2 + |w2|^2) over
// standardized features; fills `grad` when non-null.
double classifier_loss(const ClassifierParams& params, const Eigen::MatrixXd& features,
                       std::span<const int> labels, double weight_decay, ClassifierParams* grad);

Eigen::VectorXd classifier_logits(const ClassifierParams& params, const Eigen::MatrixXd& features);

struct ListClassifier {
  std::shared_ptr<const ListEncoder> encoder;
  Standardizer standardizer;
  ClassifierParams params;
  ClassifierHyper hyper;
  int best_epoch = 0;
  double train_auc = 0.5;
  double validation_auc = 0.5;
  std::vector<double> validation_loss;

  Eigen::VectorXd scores(const RecommendationTable& recs) const;
};

// Full-batch Adam with early stopping on the validation log-loss of a
// stratified slice of the training users; the best epoch's weights are kept.
// The encoder (and its embedding table) is never modified.
ListClassifier train_list_classifier(std::shared_ptr<const ListEncoder> encoder,
                                     const RecommendationTable& train_recs,
                                     std::span<const int> train_labels,
                                     const ClassifierHyper& hyper, const SeedSpec& seed);

// Unfolded AUC of the classifier's scores on held-out users.
double neural_auc(const ListClassifier& classifier, const RecommendationTable& test_recs,
                  std::span<const int> test_labels);
// Mean over several independently seeded classifiers.
double neural_auc(std::span<const ListClassifier> classifiers, const RecommendationTable& test_recs,
                  std::span<const int> test_labels);

inline constexpr int kDefaultClassifierSeeds = 5;

// Trains `classifier_seeds` classifiers on the train lists and averages
// their test AUC.
double evaluate_neural_auc(std::shared_ptr<const ListEncoder> encoder,
                           const RecommendationTable& train_recs, std::span<const int> train_labels,
                           const RecommendationTable& test_recs, std::span<const int> test_labels,
                           const ClassifierHyper& hyper, const SeedSpec& seed,
                           int classifier_seeds = kDefaultClassifierSeeds);

}  // namespace fairrec

#endif  // FAIRREC_NEURALAUC_LIST_CLASSIFIER_HPP_
