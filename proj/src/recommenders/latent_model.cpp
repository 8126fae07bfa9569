#include "fairrec/recommenders/latent_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairrec/core/error.hpp"
#include "fairrec/core/topk.hpp"

namespace fairrec {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

Eigen::MatrixXd hidden(const LatentModel& m, const SparseRows& inputs) {
  Eigen::MatrixXd z = inputs * m.encoder_weights.transpose();
  z.rowwise() += m.encoder_bias.transpose();
  return z.array().tanh().matrix();
}

// Adam state for one parameter block.
template <typename Param>
struct AdamSlot {
  Param m;
  Param v;
  explicit AdamSlot(const Param& like) : m(Param::Zero(like.rows(), like.cols())), v(m) {}

  void step(Param& param, const Param& grad, double lr, int t) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    m = b1 * m + (1 - b1) * grad;
    v = b2 * v + (1 - b2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
};

struct ScalarAdam {
  double m = 0.0, v = 0.0;
  void step(double& param, double grad, double lr, int t) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    m = b1 * m + (1 - b1) * grad;
    v = b2 * v + (1 - b2) * grad * grad;
    param -= lr * (m / (1.0 - std::pow(b1, t))) / (std::sqrt(v / (1.0 - std::pow(b2, t))) + eps);
  }
};

}  // namespace

std::string to_string(AdversaryObjective o) {
  return o == AdversaryObjective::kReverse ? "reverse" : "confusion";
}

AdversaryObjective adversary_objective_from_string(const std::string& s) {
  if (s == "reverse") return AdversaryObjective::kReverse;
  if (s == "confusion") return AdversaryObjective::kConfusion;
  throw ConfigError("unknown adversary objective '" + s + "' (expected reverse or confusion)");
}

void LatentHyper::validate() const {
  if (latent_dim < 1) throw ConfigError("latent_dim must be positive");
  if (epochs < 0) throw ConfigError("epochs must be nonnegative");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  const auto usable = [](double lr) { return lr > 0.0 && std::isfinite(lr); };
  if (!usable(learning_rate) || !usable(adversary_learning_rate)) {
    throw ConfigError("learning rates must be positive and finite");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (!(fairness_weight >= 0.0)) throw ConfigError("fairness_weight must be nonnegative");
  if (adversary_steps < 1) throw ConfigError("adversary_steps must be at least 1");
  if (!(confusion_scale >= 0.0)) throw ConfigError("confusion_scale must be nonnegative");
}

LatentGradients LatentGradients::zeros_like(const LatentModel& m) {
  LatentGradients g;
  g.encoder_weights = Eigen::MatrixXd::Zero(m.encoder_weights.rows(), m.encoder_weights.cols());
  g.encoder_bias = Eigen::VectorXd::Zero(m.encoder_bias.size());
  g.decoder_weights = Eigen::MatrixXd::Zero(m.decoder_weights.rows(), m.decoder_weights.cols());
  g.decoder_bias = Eigen::VectorXd::Zero(m.decoder_bias.size());
  g.adversary_weights = Eigen::VectorXd::Zero(m.adversary_weights.size());
  return g;
}

SparseRows encode_inputs(std::span<const std::vector<int>> item_sets, int num_items) {
  SparseRows x(static_cast<Eigen::Index>(item_sets.size()), num_items);
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t r = 0; r < item_sets.size(); ++r) {
    if (item_sets[r].empty()) continue;
    const double value = 1.0 / std::sqrt(static_cast<double>(item_sets[r].size()));
    for (int i : item_sets[r]) triplets.emplace_back(static_cast<int>(r), i, value);
  }
  x.setFromTriplets(triplets.begin(), triplets.end());
  return x;
}

SparseRows encode_inputs(const InteractionDataset& dataset) {
  std::vector<std::vector<int>> sets(dataset.num_users());
  for (int u = 0; u < dataset.num_users(); ++u) {
    auto h = dataset.items_of(u);
    sets[u].assign(h.begin(), h.end());
  }
  return encode_inputs(sets, dataset.num_items());
}

double reconstruction_loss(const LatentModel& m, const SparseRows& inputs,
                           std::span<const std::vector<int>> targets, LatentGradients* grad) {
  const Eigen::MatrixXd h = hidden(m, inputs);
  Eigen::MatrixXd scores = h * m.decoder_weights.transpose();
  scores.rowwise() += m.decoder_bias.transpose();

  int rows_with_targets = 0;
  for (const auto& t : targets) rows_with_targets += t.empty() ? 0 : 1;
  if (rows_with_targets == 0) return 0.0;

  double loss = 0.0;
  Eigen::MatrixXd d_scores = Eigen::MatrixXd::Zero(scores.rows(), scores.cols());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const auto& t = targets[r];
    if (t.empty()) continue;
    const double mx = scores.row(r).maxCoeff();
    const Eigen::ArrayXd e = (scores.row(r).array() - mx).exp();
    const double log_z = mx + std::log(e.sum());
    double row_loss = 0.0;
    for (int i : t) row_loss += log_z - scores(r, i);
    const double inv_m = 1.0 / static_cast<double>(t.size());
    loss += row_loss * inv_m;
    if (grad) {
      d_scores.row(r) = (e / e.sum()).matrix().transpose();
      for (int i : t) d_scores(r, i) -= inv_m;
    }
  }
  const double scale = 1.0 / rows_with_targets;
  if (grad) {
    d_scores *= scale;
    grad->decoder_weights = d_scores.transpose() * h;
    grad->decoder_bias = d_scores.colwise().sum().transpose();
    const Eigen::MatrixXd d_z =
        ((d_scores * m.decoder_weights).array() * (1.0 - h.array().square())).matrix();
    grad->encoder_weights = (inputs.transpose() * d_z).transpose();
    grad->encoder_bias = d_z.colwise().sum().transpose();
  }
  return loss * scale;
}

double adversary_loss(const LatentModel& m, const SparseRows& inputs, std::span<const int> labels,
                      LatentGradients* grad) {
  const Eigen::MatrixXd h = hidden(m, inputs);
  const Eigen::Index n = h.rows();
  if (n == 0) return 0.0;
  const Eigen::VectorXd logits = (h * m.adversary_weights).array() + m.adversary_bias;
  double loss = 0.0;
  Eigen::VectorXd d_logits(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    loss += softplus(logits[r]) - (labels[r] == 1 ? logits[r] : 0.0);
    d_logits[r] = (sigmoid(logits[r]) - labels[r]) / static_cast<double>(n);
  }
  if (grad) {
    grad->adversary_weights = h.transpose() * d_logits;
    grad->adversary_bias = d_logits.sum();
    const Eigen::MatrixXd d_z =
        ((d_logits * m.adversary_weights.transpose()).array() * (1.0 - h.array().square()))
            .matrix();
    grad->encoder_weights = (inputs.transpose() * d_z).transpose();
    grad->encoder_bias = d_z.colwise().sum().transpose();
  }
  return loss / static_cast<double>(n);
}

double adversary_confusion_loss(const LatentModel& m, const SparseRows& inputs,
                                LatentGradients* grad) {
  const Eigen::MatrixXd h = hidden(m, inputs);
  const Eigen::Index n = h.rows();
  if (n == 0) return 0.0;
  const Eigen::VectorXd logits = (h * m.adversary_weights).array() + m.adversary_bias;
  double loss = 0.0;
  Eigen::VectorXd d_logits(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    loss += softplus(logits[r]) - 0.5 * logits[r];
    d_logits[r] = (sigmoid(logits[r]) - 0.5) / static_cast<double>(n);
  }
  if (grad) {
    const Eigen::MatrixXd d_z =
        ((d_logits * m.adversary_weights.transpose()).array() * (1.0 - h.array().square()))
            .matrix();
    grad->encoder_weights = (inputs.transpose() * d_z).transpose();
    grad->encoder_bias = d_z.colwise().sum().transpose();
  }
  return loss / static_cast<double>(n);
}

LatentModel init_latent_model(int num_items, const LatentHyper& hyper, const SeedSpec& seed) {
  hyper.validate();
  const int d = hyper.latent_dim;
  LatentModel m;
  m.hyper = hyper;
  m.seed = seed.value();
  m.num_items = num_items;
  auto glorot = [](int rows, int cols, Rng rng) {
    const double limit = std::sqrt(6.0 / (rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
    }
    return w;
  };
  m.encoder_weights = glorot(d, num_items, seed.derive("encoder").engine());
  m.encoder_bias = Eigen::VectorXd::Zero(d);
  m.decoder_weights = glorot(num_items, d, seed.derive("decoder").engine());
  m.decoder_bias = Eigen::VectorXd::Zero(num_items);
  m.adversary_weights = glorot(d, 1, seed.derive("adversary").engine());
  m.adversary_bias = 0.0;
  return m;
}

LatentModel train_latent(const InteractionDataset& train, const LatentHyper& hyper,
                         const SeedSpec& seed) {
  hyper.validate();
  if (train.num_users() == 0) throw DataError("train_latent: empty training set");
  LatentModel m = init_latent_model(train.num_items(), hyper, seed);
  const bool use_adversary = hyper.adversary_enabled;
  const bool reverse = use_adversary && hyper.fairness_weight > 0.0;

  AdamSlot<Eigen::MatrixXd> enc_w(m.encoder_weights);
  AdamSlot<Eigen::VectorXd> enc_b(m.encoder_bias);
  AdamSlot<Eigen::MatrixXd> dec_w(m.decoder_weights);
  AdamSlot<Eigen::VectorXd> dec_b(m.decoder_bias);
  AdamSlot<Eigen::VectorXd> adv_w(m.adversary_weights);
  ScalarAdam adv_b;

  std::vector<int> order(train.num_users());
  std::iota(order.begin(), order.end(), 0);
  Rng order_rng = seed.derive("batch-order").engine();
  Rng mask_rng = seed.derive("mask").engine();
  std::bernoulli_distribution drop(hyper.dropout);
  int step = 0, adv_step = 0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    double recon_sum = 0.0, adv_sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t end = std::min(order.size(), start + hyper.batch_size);
      std::vector<std::vector<int>> kept(end - start), masked(end - start);
      std::vector<int> labels(end - start);
      for (std::size_t r = start; r < end; ++r) {
        const int u = order[r];
        labels[r - start] = train.label(u);
        for (int i : train.items_of(u)) {
          (drop(mask_rng) ? masked : kept)[r - start].push_back(i);
        }
      }
      const SparseRows x = encode_inputs(kept, train.num_items());
      LatentGradients g_rec = LatentGradients::zeros_like(m);
      const double rec = reconstruction_loss(m, x, masked, &g_rec);
      double adv = 0.0;
      LatentGradients g_adv;
      if (use_adversary) {
        // The adversary catches up on this batch before its gradient is reversed.
        for (int s = 1; s < hyper.adversary_steps; ++s) {
          adversary_loss(m, x, labels, &g_adv);
          ++adv_step;
          adv_w.step(m.adversary_weights, g_adv.adversary_weights, hyper.adversary_learning_rate, adv_step);
          adv_b.step(m.adversary_bias, g_adv.adversary_bias, hyper.adversary_learning_rate, adv_step);
        }
        adv = adversary_loss(m, x, labels, &g_adv);
      }
      if (!std::isfinite(rec) || !std::isfinite(adv)) {
        throw TrainingError("diverged at epoch " + std::to_string(epoch));
      }
      ++step;
      if (reverse && hyper.adversary_objective == AdversaryObjective::kReverse) {
        g_rec.encoder_weights -= hyper.fairness_weight * g_adv.encoder_weights;
        g_rec.encoder_bias -= hyper.fairness_weight * g_adv.encoder_bias;
      } else if (reverse) {
        LatentGradients g_conf;
        adversary_confusion_loss(m, x, &g_conf);
        const double w = hyper.fairness_weight * hyper.confusion_scale;
        g_rec.encoder_weights += w * g_conf.encoder_weights;
        g_rec.encoder_bias += w * g_conf.encoder_bias;
      }
      enc_w.step(m.encoder_weights, g_rec.encoder_weights, hyper.learning_rate, step);
      enc_b.step(m.encoder_bias, g_rec.encoder_bias, hyper.learning_rate, step);
      dec_w.step(m.decoder_weights, g_rec.decoder_weights, hyper.learning_rate, step);
      dec_b.step(m.decoder_bias, g_rec.decoder_bias, hyper.learning_rate, step);
      if (use_adversary) {
        ++adv_step;
        adv_w.step(m.adversary_weights, g_adv.adversary_weights, hyper.adversary_learning_rate, adv_step);
        adv_b.step(m.adversary_bias, g_adv.adversary_bias, hyper.adversary_learning_rate, adv_step);
      }
      recon_sum += rec;
      adv_sum += adv;
      ++batches;
    }
    m.reconstruction_history.push_back(recon_sum / batches);
    m.adversary_history.push_back(use_adversary ? adv_sum / batches : 0.0);
  }
  return m;
}

RepresentationMatrix latent_representations(const LatentModel& model,
                                            const InteractionDataset& dataset,
                                            std::span<const int> users) {
  std::vector<std::vector<int>> sets;
  if (users.empty()) {
    for (int u = 0; u < dataset.num_users(); ++u) {
      auto h = dataset.items_of(u);
      sets.emplace_back(h.begin(), h.end());
    }
  } else {
    for (int u : users) {
      if (u < 0 || u >= dataset.num_users()) throw DataError("unknown user " + std::to_string(u));
      auto h = dataset.items_of(u);
      sets.emplace_back(h.begin(), h.end());
    }
  }
  return hidden(model, encode_inputs(sets, model.num_items));
}

Eigen::VectorXd latent_scores(const LatentModel& model, std::span<const int> user_history) {
  std::vector<std::vector<int>> sets{{user_history.begin(), user_history.end()}};
  const Eigen::MatrixXd h = hidden(model, encode_inputs(sets, model.num_items));
  return model.decoder_weights * h.row(0).transpose() + model.decoder_bias;
}

std::vector<int> latent_recommend(const LatentModel& model, std::span<const int> user_history,
                                  int k) {
  const Eigen::VectorXd scores = latent_scores(model, user_history);
  std::vector<int> sorted_history(user_history.begin(), user_history.end());
  std::sort(sorted_history.begin(), sorted_history.end());
  return select_top_k(std::span<const double>(scores.data(), scores.size()), sorted_history, k);
}

RecommendationTable latent_recommend_all(const LatentModel& model, const InteractionDataset& users,
                                         int k) {
  if (users.num_items() != model.num_items) throw DataError("item universe mismatch");
  RecommendationTable table;
  table.k = k;
  table.lists.resize(users.num_users());
  const Eigen::MatrixXd h = hidden(model, encode_inputs(users));
  Eigen::VectorXd scores(model.num_items);
  for (int u = 0; u < users.num_users(); ++u) {
    scores.noalias() = model.decoder_weights * h.row(u).transpose();
    scores += model.decoder_bias;
    table.lists[u] =
        select_top_k(std::span<const double>(scores.data(), scores.size()), users.items_of(u), k);
  }
  return table;
}

}  // namespace fairrec
