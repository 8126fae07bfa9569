#include "fairrec/core/random.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace fairrec {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Order-sensitive combination of a parent state and a child key.
std::uint64_t mix(std::uint64_t state, std::uint64_t key) {
  return splitmix64(splitmix64(state) ^ (key + 0x632be59bd9b4e019ULL));
}

}  // namespace

SeedSpec::SeedSpec(std::uint64_t master_seed)
    : master_(master_seed), state_(splitmix64(master_seed)) {}

SeedSpec SeedSpec::derive(std::string_view label) const {
  return SeedSpec(master_, mix(state_, fnv1a(label)));
}

SeedSpec SeedSpec::derive(std::uint64_t index) const {
  return SeedSpec(master_, mix(state_ ^ 0x5bd1e995ULL, index));
}

SeedSpec SeedSpec::derive_value(double v) const {
  if (v == 0.0) v = 0.0;  // collapse -0.0
  return SeedSpec(master_, mix(state_ ^ 0x27d4eb2fULL, std::bit_cast<std::uint64_t>(v)));
}

Rng SeedSpec::engine() const {
  std::seed_seq seq{static_cast<std::uint32_t>(state_),
                    static_cast<std::uint32_t>(state_ >> 32)};
  return Rng(seq);
}

Eigen::VectorXd sample_dirichlet(const Eigen::VectorXd& alpha, Rng& rng) {
  const Eigen::Index n = alpha.size();
  Eigen::VectorXd log_x(n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = alpha[j];
    if (a >= 1.0) {
      std::gamma_distribution<double> gamma(a, 1.0);
      log_x[j] = std::log(gamma(rng));
    } else {
      // Gamma(a) = Gamma(a + 1) * U^(1/a)
      std::gamma_distribution<double> gamma(a + 1.0, 1.0);
      const double g = gamma(rng);
      double u = unif(rng);
      if (u <= 0.0) u = std::numeric_limits<double>::min();
      log_x[j] = std::log(g) + std::log(u) / a;
    }
  }
  const double m = log_x.maxCoeff();
  Eigen::VectorXd x = (log_x.array() - m).exp().matrix();
  return x / x.sum();
}

}  // namespace fairrec
