#include "fairrec/neuralauc/list_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairrec/core/error.hpp"
#include "fairrec/metrics/auc.hpp"

namespace fairrec {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& x, std::span<const int> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r) out.row(r) = x.row(rows[r]);
  return out;
}

struct Adam {
  ClassifierParams m, v;
  int t = 0;

  explicit Adam(const ClassifierParams& like) {
    m.w1 = Eigen::MatrixXd::Zero(like.w1.rows(), like.w1.cols());
    m.b1 = Eigen::VectorXd::Zero(like.b1.size());
    m.w2 = Eigen::VectorXd::Zero(like.w2.size());
    v = m;
  }

  template <typename P>
  static void update(P& param, P& mom, P& var, const P& g, double lr, double c1, double c2) {
    mom = 0.9 * mom + 0.1 * g;
    var = 0.999 * var + 0.001 * g.cwiseProduct(g);
    param.array() -= lr * (mom.array() / c1) / ((var.array() / c2).sqrt() + 1e-8);
  }

  void step(ClassifierParams& p, const ClassifierParams& g, double lr) {
    ++t;
    const double c1 = 1.0 - std::pow(0.9, t);
    const double c2 = 1.0 - std::pow(0.999, t);
    update(p.w1, m.w1, v.w1, g.w1, lr, c1, c2);
    update(p.b1, m.b1, v.b1, g.b1, lr, c1, c2);
    update(p.w2, m.w2, v.w2, g.w2, lr, c1, c2);
    m.b2 = 0.9 * m.b2 + 0.1 * g.b2;
    v.b2 = 0.999 * v.b2 + 0.001 * g.b2 * g.b2;
    p.b2 -= lr * (m.b2 / c1) / (std::sqrt(v.b2 / c2) + 1e-8);
  }
};

}  // namespace

MeanPoolEncoder::MeanPoolEncoder(std::shared_ptr<const EmbeddingTable> embeddings,
                                 std::shared_ptr<const DemographicRatioTable> polarization)
    : embeddings_(std::move(embeddings)), polarization_(std::move(polarization)) {
  if (!embeddings_ || !polarization_) throw ConfigError("MeanPoolEncoder needs both tables");
  if (embeddings_->num_items() != polarization_->num_items()) {
    throw DataError("embedding and polarization tables disagree on the item count");
  }
}

int MeanPoolEncoder::feature_dim() const { return embeddings_->dim() + 1; }

Eigen::VectorXd MeanPoolEncoder::encode(std::span<const int> items) const {
  if (items.empty()) throw DataError("cannot encode an empty recommendation list");
  std::vector<int> sorted(items.begin(), items.end());
  std::sort(sorted.begin(), sorted.end());
  const int dim = embeddings_->dim();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim + 1);
  for (int item : sorted) {
    if (item < 0 || item >= embeddings_->num_items()) throw DataError("unknown item in list");
    sum.head(dim) += embeddings_->vectors.row(item).transpose();
    sum[dim] += polarization_->ratio[item];
  }
  return sum / static_cast<double>(sorted.size());
}

Eigen::MatrixXd encode_lists(const ListEncoder& encoder, const RecommendationTable& recs) {
  Eigen::MatrixXd out(recs.num_users(), encoder.feature_dim());
  for (int u = 0; u < recs.num_users(); ++u) out.row(u) = encoder.encode(recs.lists[u]).transpose();
  return out;
}

Eigen::VectorXd classifier_logits(const ClassifierParams& p, const Eigen::MatrixXd& features) {
  Eigen::MatrixXd h = features * p.w1.transpose();
  h.rowwise() += p.b1.transpose();
  return (h.array().tanh().matrix() * p.w2).array() + p.b2;
}

double classifier_loss(const ClassifierParams& p, const Eigen::MatrixXd& features,
                       std::span<const int> labels, double weight_decay, ClassifierParams* grad) {
  const Eigen::Index n = features.rows();
  if (n == 0) throw DataError("classifier_loss: no samples");
  Eigen::MatrixXd z = features * p.w1.transpose();
  z.rowwise() += p.b1.transpose();
  const Eigen::MatrixXd h = z.array().tanh().matrix();
  const Eigen::VectorXd logits = (h * p.w2).array() + p.b2;
  double loss = 0.0;
  Eigen::VectorXd d_logits(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    loss += softplus(logits[i]) - (labels[i] == 1 ? logits[i] : 0.0);
    d_logits[i] = (sigmoid(logits[i]) - labels[i]) / static_cast<double>(n);
  }
  loss = loss / static_cast<double>(n) +
         0.5 * weight_decay * (p.w1.squaredNorm() + p.w2.squaredNorm());
  if (grad) {
    grad->w2 = h.transpose() * d_logits + weight_decay * p.w2;
    grad->b2 = d_logits.sum();
    const Eigen::MatrixXd d_z =
        ((d_logits * p.w2.transpose()).array() * (1.0 - h.array().square())).matrix();
    grad->w1 = d_z.transpose() * features + weight_decay * p.w1;
    grad->b1 = d_z.colwise().sum().transpose();
  }
  return loss;
}

Eigen::VectorXd ListClassifier::scores(const RecommendationTable& recs) const {
  return classifier_logits(params, standardizer.apply(encode_lists(*encoder, recs)));
}

ListClassifier train_list_classifier(std::shared_ptr<const ListEncoder> encoder,
                                     const RecommendationTable& train_recs,
                                     std::span<const int> train_labels,
                                     const ClassifierHyper& hyper, const SeedSpec& seed) {
  if (!encoder) throw ConfigError("train_list_classifier: no list encoder");
  if (static_cast<int>(train_labels.size()) != train_recs.num_users()) {
    throw DataError("recommendations do not cover all labeled train users");
  }
  const auto positives = std::count(train_labels.begin(), train_labels.end(), 1);
  if (positives < 2 || positives > static_cast<std::ptrdiff_t>(train_labels.size()) - 2) {
    throw DataError("train_list_classifier: degenerate training labels (need both classes)");
  }
  if (hyper.hidden < 1 || hyper.max_epochs < 1 || hyper.patience < 1) {
    throw ConfigError("invalid classifier hyperparameters");
  }

  ListClassifier clf;
  clf.encoder = encoder;
  clf.hyper = hyper;
  const Eigen::MatrixXd raw = encode_lists(*encoder, train_recs);
  clf.standardizer = Standardizer::fit(raw);
  const Eigen::MatrixXd features = clf.standardizer.apply(raw);

  Rng split_rng = seed.derive("validation").engine();
  auto [val_idx, fit_idx] = stratified_holdout(train_labels, hyper.validation_fraction, split_rng);
  const Eigen::MatrixXd x_fit = select_rows(features, fit_idx);
  const Eigen::MatrixXd x_val = select_rows(features, val_idx);
  std::vector<int> y_fit, y_val;
  for (int i : fit_idx) y_fit.push_back(train_labels[i]);
  for (int i : val_idx) y_val.push_back(train_labels[i]);

  const int f = encoder->feature_dim();
  Rng init_rng = seed.derive("init").engine();
  const double limit = std::sqrt(6.0 / (f + hyper.hidden));
  std::uniform_real_distribution<double> init(-limit, limit);
  ClassifierParams& p = clf.params;
  p.w1.resize(hyper.hidden, f);
  for (Eigen::Index i = 0; i < p.w1.size(); ++i) p.w1.data()[i] = init(init_rng);
  p.b1 = Eigen::VectorXd::Zero(hyper.hidden);
  const double limit2 = std::sqrt(6.0 / (hyper.hidden + 1));
  std::uniform_real_distribution<double> init2(-limit2, limit2);
  p.w2.resize(hyper.hidden);
  for (Eigen::Index i = 0; i < p.w2.size(); ++i) p.w2[i] = init2(init_rng);
  p.b2 = 0.0;

  Adam adam(p);
  ClassifierParams best = p;
  double best_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;
  ClassifierParams grad;
  for (int epoch = 0; epoch < hyper.max_epochs; ++epoch) {
    const double loss = classifier_loss(p, x_fit, y_fit, hyper.weight_decay, &grad);
    if (!std::isfinite(loss)) {
      throw TrainingError("list classifier diverged at epoch " + std::to_string(epoch));
    }
    adam.step(p, grad, hyper.learning_rate);
    const double val_loss = mean_log_loss(classifier_logits(p, x_val), y_val);
    clf.validation_loss.push_back(val_loss);
    if (val_loss < best_loss) {
      best_loss = val_loss;
      best = p;
      clf.best_epoch = epoch + 1;
      since_best = 0;
    } else if (++since_best >= hyper.patience) {
      break;
    }
  }
  p = best;
  const Eigen::VectorXd fit_scores = classifier_logits(p, x_fit);
  const Eigen::VectorXd val_scores = classifier_logits(p, x_val);
  clf.train_auc = auc_from_scores(std::span<const double>(fit_scores.data(), fit_scores.size()), y_fit);
  clf.validation_auc =
      auc_from_scores(std::span<const double>(val_scores.data(), val_scores.size()), y_val);
  return clf;
}

double neural_auc(const ListClassifier& classifier, const RecommendationTable& test_recs,
                  std::span<const int> test_labels) {
  if (static_cast<int>(test_labels.size()) != test_recs.num_users()) {
    throw DataError("recommendations do not cover all labeled test users");
  }
  const Eigen::VectorXd s = classifier.scores(test_recs);
  return auc_from_scores(std::span<const double>(s.data(), s.size()), test_labels);
}

double neural_auc(std::span<const ListClassifier> classifiers, const RecommendationTable& test_recs,
                  std::span<const int> test_labels) {
  if (classifiers.empty()) throw ConfigError("neural_auc: no classifiers");
  double sum = 0.0;
  for (const auto& c : classifiers) sum += neural_auc(c, test_recs, test_labels);
  return sum / static_cast<double>(classifiers.size());
}

double evaluate_neural_auc(std::shared_ptr<const ListEncoder> encoder,
                           const RecommendationTable& train_recs, std::span<const int> train_labels,
                           const RecommendationTable& test_recs, std::span<const int> test_labels,
                           const ClassifierHyper& hyper, const SeedSpec& seed,
                           int classifier_seeds) {
  if (classifier_seeds < 1) throw ConfigError("classifier_seeds must be positive");
  std::vector<ListClassifier> classifiers;
  for (int s = 0; s < classifier_seeds; ++s) {
    classifiers.push_back(train_list_classifier(encoder, train_recs, train_labels, hyper,
                                                seed.derive(static_cast<std::uint64_t>(s))));
  }
  return neural_auc(classifiers, test_recs, test_labels);
}

}  // namespace fairrec
