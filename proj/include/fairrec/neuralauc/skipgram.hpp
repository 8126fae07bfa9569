#ifndef FAIRREC_NEURALAUC_SKIPGRAM_HPP_
#define FAIRREC_NEURALAUC_SKIPGRAM_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fairrec/core/dataset.hpp"
#include "fairrec/core/random.hpp"

namespace fairrec {

struct SkipGramPair {
  int center = 0;
  int neighbor = 0;
  friend bool operator==(const SkipGramPair&, const SkipGramPair&) = default;
};
using SkipGramPairs = std::vector<SkipGramPair>;

// For every (user, liked item), up to max_neighbors distinct other items the
// user liked, drawn uniformly without replacement. Each user draws from its
// own stream.
SkipGramPairs sample_skipgram_pairs(const InteractionDataset& train, int max_neighbors,
                                    const SeedSpec& seed);

struct EmbeddingHyper {
  int dim = 32;
  int negatives = 5;
  int epochs = 3;
  double learning_rate = 0.025;
  double unigram_power = 0.75;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Input-side item embeddings of a skip-gram model with negative sampling.
struct EmbeddingTable {
  RowMatrix vectors;               // one row per item
  std::vector<bool> never_paired;  // row kept at its random initialization
  int epochs = 0;
  std::vector<double> loss_curve;  // mean negative log-likelihood per epoch

  int num_items() const { return static_cast<int>(vectors.rows()); }
  int dim() const { return static_cast<int>(vectors.cols()); }
  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;
};

// Seeded uniform(-0.5/dim, 0.5/dim) initialization of the input layer.
RowMatrix initial_embeddings(int num_items, int dim, const SeedSpec& seed);

// SGD on log sigmoid(e_c . o_n) + sum over negatives of log sigmoid(-e_c . o_neg),
// negatives drawn from neighbor frequencies raised to unigram_power, with
// the learning rate decaying linearly to zero. Throws TrainingError on a
// non-finite loss.
EmbeddingTable train_item_embeddings(const SkipGramPairs& pairs, int num_items,
                                     const EmbeddingHyper& hyper, const SeedSpec& seed);

}  // namespace fairrec

#endif  // FAIRREC_NEURALAUC_SKIPGRAM_HPP_
