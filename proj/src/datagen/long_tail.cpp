#include "fairrec/datagen/long_tail.hpp"

#include <cmath>
#include <numbers>

#include "fairrec/core/error.hpp"

namespace fairrec {

double LongTailParams::pdf(double x) const {
  if (x <= 0.0) return 0.0;
  const double z = (std::log(x) - mu) / sigma;
  return std::exp(-0.5 * z * z) / (x * sigma * std::sqrt(2.0 * std::numbers::pi));
}

double LongTailParams::median() const { return std::exp(mu); }

LongTailParams fit_log_normal(std::span<const double> samples) {
  if (samples.size() < 2) throw ConfigError("fit_log_normal needs at least two samples");
  double sum = 0.0;
  for (double s : samples) {
    if (!(s > 0.0)) throw DataError("fit_log_normal: nonpositive sample " + std::to_string(s));
    sum += std::log(s);
  }
  const double n = static_cast<double>(samples.size());
  const double mu = sum / n;
  double ss = 0.0;
  for (double s : samples) {
    const double d = std::log(s) - mu;
    ss += d * d;
  }
  const double sigma = std::sqrt(ss / n);
  if (!(sigma > 1e-12)) throw DataError("fit_log_normal: degenerate sample (zero variance)");
  return {mu, sigma};
}

double sample_long_tail(const LongTailParams& params, Rng& rng) {
  std::lognormal_distribution<double> dist(params.mu, params.sigma);
  return dist(rng);
}

std::vector<double> sample_long_tail(const LongTailParams& params, int n, const SeedSpec& seed) {
  if (n < 1) throw ConfigError("sample_long_tail needs n >= 1");
  if (!(params.sigma > 0.0)) throw ConfigError("log-normal sigma must be positive");
  Rng rng = seed.engine();
  std::vector<double> out(n);
  for (double& v : out) v = sample_long_tail(params, rng);
  return out;
}

}  // namespace fairrec
