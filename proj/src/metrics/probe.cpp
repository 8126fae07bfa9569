#include "fairrec/metrics/probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairrec/core/error.hpp"
#include "fairrec/metrics/auc.hpp"

namespace fairrec {

namespace {

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& x, std::span<const int> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r) out.row(r) = x.row(rows[r]);
  return out;
}

std::vector<int> select(std::span<const int> v, std::span<const int> idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(v[i]);
  return out;
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void require_both_classes(std::span<const int> labels, const char* what) {
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(labels.size())) {
    throw DataError(std::string(what) + ": both classes must be present");
  }
}

}  // namespace

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  Standardizer s;
  const double n = static_cast<double>(std::max<Eigen::Index>(x.rows(), 1));
  s.mean = x.colwise().sum() / n;
  Eigen::RowVectorXd var = (x.rowwise() - s.mean).array().square().colwise().sum() / n;
  s.inv_scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    s.inv_scale[j] = var[j] > 1e-24 ? 1.0 / std::sqrt(var[j]) : 0.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  return ((x.rowwise() - mean).array().rowwise() * inv_scale.array()).matrix();
}

Eigen::VectorXd LogisticRegression::decision_function(const Eigen::MatrixXd& x) const {
  return (standardizer.apply(x) * weights).array() + bias;
}

double mean_log_loss(const Eigen::VectorXd& logits, std::span<const int> labels) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    sum += softplus(logits[i]) - (labels[i] == 1 ? logits[i] : 0.0);
  }
  return sum / static_cast<double>(logits.size());
}

LogisticRegression fit_logistic(const Eigen::MatrixXd& x, std::span<const int> labels, double l2,
                                int max_iterations, double tolerance) {
  if (x.rows() != static_cast<Eigen::Index>(labels.size())) {
    throw DataError("fit_logistic: row/label count mismatch");
  }
  require_both_classes(labels, "fit_logistic");
  LogisticRegression model;
  model.standardizer = Standardizer::fit(x);
  const Eigen::MatrixXd z = model.standardizer.apply(x);
  const Eigen::Index n = z.rows();
  const Eigen::Index d = z.cols();
  // Augmented design [z, 1]; parameter theta = [w; b].
  Eigen::MatrixXd design(n, d + 1);
  design << z, Eigen::VectorXd::Ones(n);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[i];
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, l2);
  penalty[d] = 0.0;

  auto objective = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd logits = design * theta;
    return mean_log_loss(logits, labels) +
           0.5 * (penalty.array() * theta.array().square()).sum();
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  const double prior = y.mean();
  theta[d] = std::log(prior / (1.0 - prior));
  double f = objective(theta);
  double grad_norm = std::numeric_limits<double>::infinity();
  bool converged = false;
  int it = 0;
  for (; it < max_iterations; ++it) {
    const Eigen::VectorXd logits = design * theta;
    Eigen::VectorXd p(n);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = sigmoid(logits[i]);
      w[i] = p[i] * (1.0 - p[i]);
    }
    const Eigen::VectorXd grad =
        design.transpose() * (p - y) / static_cast<double>(n) + penalty.cwiseProduct(theta);
    grad_norm = grad.lpNorm<Eigen::Infinity>();
    if (grad_norm < tolerance) {
      converged = true;
      break;
    }
    Eigen::MatrixXd hess = design.transpose() * w.asDiagonal() * design / static_cast<double>(n);
    hess.diagonal() += penalty;
    hess.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    // Newton decrement: at this size the remaining gain is below rounding.
    if (grad.dot(step) < 1e-18) {
      converged = true;
      break;
    }
    double t = 1.0;
    double f_new = objective(theta - step);
    while (f_new > f - 1e-4 * t * grad.dot(step) && t > 1e-10) {
      t *= 0.5;
      f_new = objective(theta - t * step);
    }
    if (!std::isfinite(f_new)) {
      throw TrainingError("fit_logistic: non-finite objective at iteration " + std::to_string(it));
    }
    // Stalled line search with a tiny gradient: rounding noise, not a bad fit.
    if (f_new >= f && grad_norm < 1e-6) {
      converged = true;
      break;
    }
    theta -= t * step;
    f = f_new;
  }
  if (!converged) {
    throw TrainingError("fit_logistic: no convergence after " + std::to_string(max_iterations) +
                        " iterations (gradient norm " + std::to_string(grad_norm) +
                        ", l2 " + std::to_string(l2) + ", objective " + std::to_string(f) + ")");
  }
  model.weights = theta.head(d);
  model.bias = theta[d];
  model.iterations = it;
  return model;
}

std::pair<std::vector<int>, std::vector<int>> stratified_holdout(std::span<const int> labels,
                                                                 double fraction, Rng& rng) {
  std::vector<int> held;
  std::vector<int> rest;
  for (int cls : {0, 1}) {
    std::vector<int> members;
    for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);
    int n_held = static_cast<int>(std::lround(fraction * static_cast<double>(members.size())));
    n_held = std::clamp(n_held, members.size() > 1 ? 1 : 0,
                        std::max(0, static_cast<int>(members.size()) - 1));
    held.insert(held.end(), members.begin(), members.begin() + n_held);
    rest.insert(rest.end(), members.begin() + n_held, members.end());
  }
  std::sort(held.begin(), held.end());
  std::sort(rest.begin(), rest.end());
  return {held, rest};
}

double representation_auc(const RepresentationMatrix& reps_train, std::span<const int> labels_train,
                          const RepresentationMatrix& reps_test, std::span<const int> labels_test,
                          const ProbeOptions& options, const SeedSpec& seed) {
  require_both_classes(labels_train, "representation_auc (train)");
  require_both_classes(labels_test, "representation_auc (test)");
  if (options.l2_grid.empty()) throw ConfigError("representation_auc: empty l2 grid");
  if (options.probe_seeds < 1) throw ConfigError("representation_auc: probe_seeds must be >= 1");
  double total = 0.0;
  for (int s = 0; s < options.probe_seeds; ++s) {
    Rng rng = seed.derive("probe").derive(static_cast<std::uint64_t>(s)).engine();
    auto [val_idx, fit_idx] = stratified_holdout(labels_train, options.validation_fraction, rng);
    const Eigen::MatrixXd x_fit = select_rows(reps_train, fit_idx);
    const Eigen::MatrixXd x_val = select_rows(reps_train, val_idx);
    const auto y_fit = select(labels_train, fit_idx);
    const auto y_val = select(labels_train, val_idx);
    double best_l2 = options.l2_grid.front();
    double best_loss = std::numeric_limits<double>::infinity();
    for (double l2 : options.l2_grid) {
      const auto model = fit_logistic(x_fit, y_fit, l2, options.max_iterations);
      const double loss = mean_log_loss(model.decision_function(x_val), y_val);
      if (loss < best_loss) {
        best_loss = loss;
        best_l2 = l2;
      }
    }
    const auto model = fit_logistic(reps_train, labels_train, best_l2, options.max_iterations);
    const Eigen::VectorXd scores = model.decision_function(reps_test);
    total += auc_from_scores(std::span<const double>(scores.data(), scores.size()), labels_test);
  }
  return total / options.probe_seeds;
}

}  // namespace fairrec
