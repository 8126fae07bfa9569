#include "fairrec/neuralauc/skipgram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairrec/core/error.hpp"

namespace fairrec {

SkipGramPairs sample_skipgram_pairs(const InteractionDataset& train, int max_neighbors,
                                    const SeedSpec& seed) {
  if (max_neighbors < 0) throw ConfigError("max_neighbors must be nonnegative");
  SkipGramPairs pairs;
  std::vector<int> others;
  for (int u = 0; u < train.num_users(); ++u) {
    const auto items = train.items_of(u);
    if (items.size() < 2) continue;
    Rng rng = seed.derive(static_cast<std::uint64_t>(u)).engine();
    const std::size_t n = items.size();
    std::vector<std::size_t> chosen;
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t take = std::min<std::size_t>(max_neighbors, n - 1);
      if (2 * take < n - 1) {
        // Rejection sampling of distinct positions other than c.
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        chosen.clear();
        while (chosen.size() < take) {
          const std::size_t j = pick(rng);
          if (j == c || std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
          chosen.push_back(j);
          pairs.push_back({items[c], items[j]});
        }
        continue;
      }
      others.clear();
      for (std::size_t j = 0; j < n; ++j) {
        if (j != c) others.push_back(items[j]);
      }
      for (std::size_t j = 0; j < take; ++j) {
        std::uniform_int_distribution<std::size_t> pick(j, others.size() - 1);
        std::swap(others[j], others[pick(rng)]);
        pairs.push_back({items[c], others[j]});
      }
    }
  }
  return pairs;
}

RowMatrix initial_embeddings(int num_items, int dim, const SeedSpec& seed) {
  Rng rng = seed.engine();
  std::uniform_real_distribution<double> dist(-0.5 / dim, 0.5 / dim);
  RowMatrix e(num_items, dim);
  for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = dist(rng);
  return e;
}

namespace {

// Walker alias table over items weighted by freq^power.
class AliasSampler {
 public:
  AliasSampler(const std::vector<double>& freq, double power)
      : prob_(freq.size(), 0.0), alias_(freq.size(), 0) {
    const std::size_t n = freq.size();
    std::vector<double> w(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = freq[i] > 0 ? std::pow(freq[i], power) : 0.0;
      total += w[i];
    }
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= static_cast<double>(n) / total;
      (w[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back(), l = large.back();
      small.pop_back();
      prob_[s] = w[s];
      alias_[s] = static_cast<int>(l);
      w[l] -= 1.0 - w[s];
      if (w[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::size_t i : large) prob_[i] = 1.0;
    for (std::size_t i : small) prob_[i] = 1.0;  // rounding leftovers
  }

  int operator()(Rng& rng) const {
    const std::uint64_t r = rng();
    // High half picks the column, low half flips the coin.
    const std::size_t col = static_cast<std::size_t>((r >> 32) * prob_.size() >> 32);
    const double coin = static_cast<double>(r & ((1ULL << 32) - 1)) * 0x1p-32;
    return coin < prob_[col] ? static_cast<int>(col) : alias_[col];
  }

 private:
  std::vector<double> prob_;
  std::vector<int> alias_;
};

double log_sigmoid(double z) { return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

EmbeddingTable train_item_embeddings(const SkipGramPairs& pairs, int num_items,
                                     const EmbeddingHyper& hyper, const SeedSpec& seed) {
  if (hyper.dim < 1 || hyper.negatives < 0 || hyper.epochs < 0 || !(hyper.learning_rate > 0)) {
    throw ConfigError("invalid embedding hyperparameters");
  }
  if (pairs.empty()) throw DataError("train_item_embeddings: no skip-gram pairs");
  EmbeddingTable table;
  table.vectors = initial_embeddings(num_items, hyper.dim, seed.derive("init"));
  table.never_paired.assign(num_items, true);
  std::vector<double> neighbor_freq(num_items, 0.0);
  for (const auto& p : pairs) {
    if (p.center < 0 || p.center >= num_items || p.neighbor < 0 || p.neighbor >= num_items) {
      throw DataError("skip-gram pair refers to an unknown item");
    }
    table.never_paired[p.center] = false;
    table.never_paired[p.neighbor] = false;
    neighbor_freq[p.neighbor] += 1.0;
  }
  table.epochs = hyper.epochs;
  if (hyper.epochs == 0) return table;

  RowMatrix output = RowMatrix::Zero(num_items, hyper.dim);
  const AliasSampler negatives(neighbor_freq, hyper.unigram_power);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = seed.derive("train").engine();
  const double total_steps = static_cast<double>(pairs.size()) * hyper.epochs;
  double done = 0.0;
  const int dim = hyper.dim;
  std::vector<double> update(dim);
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss = 0.0;
    for (std::size_t idx : order) {
      const auto& p = pairs[idx];
      const double lr = hyper.learning_rate * std::max(1e-4, 1.0 - done / total_steps);
      done += 1.0;
      double* center = table.vectors.row(p.center).data();
      std::fill(update.begin(), update.end(), 0.0);
      for (int n = 0; n <= hyper.negatives; ++n) {
        int target = p.neighbor;
        bool positive = true;
        if (n > 0) {
          target = negatives(rng);
          if (target == p.neighbor) continue;
          positive = false;
        }
        double* out = output.row(target).data();
        double score = 0.0;
        for (int d = 0; d < dim; ++d) score += center[d] * out[d];
        const double s = sigmoid(score);
        const double lik = positive ? s : 1.0 - s;
        loss -= lik > 1e-300 ? std::log(lik) : (positive ? log_sigmoid(score) : log_sigmoid(-score));
        const double g = lr * ((positive ? 1.0 : 0.0) - s);
        for (int d = 0; d < dim; ++d) {
          update[d] += g * out[d];
          out[d] += g * center[d];
        }
      }
      for (int d = 0; d < dim; ++d) center[d] += update[d];
    }
    loss /= static_cast<double>(pairs.size());
    if (!std::isfinite(loss)) {
      throw TrainingError("train_item_embeddings: non-finite loss in epoch " + std::to_string(epoch));
    }
    table.loss_curve.push_back(loss);
  }
  return table;
}

}  // namespace fairrec
