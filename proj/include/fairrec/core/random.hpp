#ifndef FAIRREC_CORE_RANDOM_HPP_
#define FAIRREC_CORE_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace fairrec {

using Rng = std::mt19937_64;

// A position in a tree of random streams. Every randomized operation takes a
// SeedSpec and derives child streams by label (component name) or index
// (user, replication, ...), so the bits a stream produces depend only on the
// path from the master seed and never on execution order.
class SeedSpec {
 public:
  explicit SeedSpec(std::uint64_t master_seed);

  std::uint64_t master() const { return master_; }
  // The 64-bit state identifying this node of the derivation tree.
  std::uint64_t value() const { return state_; }

  SeedSpec derive(std::string_view label) const;
  SeedSpec derive(std::uint64_t index) const;
  // Derives from the bit pattern of a double (used for sweep values).
  SeedSpec derive_value(double v) const;

  Rng engine() const;

 private:
  SeedSpec(std::uint64_t master, std::uint64_t state)
      : master_(master), state_(state) {}

  std::uint64_t master_;
  std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Draws a Dirichlet vector with the given concentration. Components are
// generated in log space so that very small concentrations (< 0.05) do not
// underflow the normalizing sum.
Eigen::VectorXd sample_dirichlet(const Eigen::VectorXd& alpha, Rng& rng);

}  // namespace fairrec

#endif  // FAIRREC_CORE_RANDOM_HPP_
