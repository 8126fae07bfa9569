#ifndef FAIRREC_DATAGEN_LONG_TAIL_HPP_
#define FAIRREC_DATAGEN_LONG_TAIL_HPP_

#include <span>
#include <vector>

#include "fairrec/core/random.hpp"

namespace fairrec {

// Log-normal long-tail distribution: log X ~ N(mu, sigma^2).
struct LongTailParams {
  double mu = 0.0;
  double sigma = 1.0;

  double pdf(double x) const;
  double median() const;
  friend bool operator==(const LongTailParams&, const LongTailParams&) = default;
};

// Closed-form maximum-likelihood fit (mean and population standard deviation
// of the log samples). Throws DataError on nonpositive samples or zero
// variance, ConfigError on fewer than two samples.
LongTailParams fit_log_normal(std::span<const double> samples);

std::vector<double> sample_long_tail(const LongTailParams& params, int n, const SeedSpec& seed);
double sample_long_tail(const LongTailParams& params, Rng& rng);

}  // namespace fairrec

#endif  // FAIRREC_DATAGEN_LONG_TAIL_HPP_
