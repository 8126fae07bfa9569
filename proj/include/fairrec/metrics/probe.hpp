#ifndef FAIRREC_METRICS_PROBE_HPP_
#define FAIRREC_METRICS_PROBE_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fairrec/core/random.hpp"

namespace fairrec {

// Row-per-user latent vectors.
using RepresentationMatrix = Eigen::MatrixXd;

// Column standardization fitted on one matrix and applied to others.
// Constant columns map to zero.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd inv_scale;

  static Standardizer fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

// L2-regularized logistic regression on standardized features.
struct LogisticRegression {
  Standardizer standardizer;
  Eigen::VectorXd weights;
  double bias = 0.0;
  int iterations = 0;

  Eigen::VectorXd decision_function(const Eigen::MatrixXd& x) const;
};

// Minimizes mean log-loss + l2/2 * |w|^2 (bias unpenalized) by damped Newton
// steps. Throws TrainingError if the gradient norm is still above tolerance
// after max_iterations.
LogisticRegression fit_logistic(const Eigen::MatrixXd& x, std::span<const int> labels, double l2,
                                int max_iterations = 100, double tolerance = 1e-8);

double mean_log_loss(const Eigen::VectorXd& logits, std::span<const int> labels);

struct ProbeOptions {
  std::vector<double> l2_grid{1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
  double validation_fraction = 0.2;
  int probe_seeds = 5;
  int max_iterations = 100;
};

// Trains on the train representations (l2 picked by validation log-loss on a
// stratified slice of the train users, then refit on all of them) and
// reports the unfolded test AUC, averaged over probe seeds.
double representation_auc(const RepresentationMatrix& reps_train, std::span<const int> labels_train,
                          const RepresentationMatrix& reps_test, std::span<const int> labels_test,
                          const ProbeOptions& options, const SeedSpec& seed);

// Stratified random subset of indices holding about `fraction` of each
// class (at least one per class). Returns (validation, remainder).
std::pair<std::vector<int>, std::vector<int>> stratified_holdout(std::span<const int> labels,
                                                                 double fraction, Rng& rng);

}  // namespace fairrec

#endif  // FAIRREC_METRICS_PROBE_HPP_
