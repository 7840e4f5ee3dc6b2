#include "nsrl/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "nsrl/errors.hpp"

namespace nsrl {

CategoricalDistribution distribution_from_logits(
    const std::vector<double>& logits) {
  if (logits.empty()) throw ConfigError("distribution: empty logits");
  for (double l : logits) {
    if (!std::isfinite(l)) {
      throw NumericError("distribution: non-finite logit");
    }
  }
  CategoricalDistribution d;
  d.logits = logits;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  d.probs.resize(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    d.probs[i] = std::exp(logits[i] - mx);
    z += d.probs[i];
  }
  const double logz = std::log(z);
  d.log_probs.resize(logits.size());
  d.entropy = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    d.probs[i] /= z;
    d.log_probs[i] = logits[i] - mx - logz;
    d.entropy -= d.probs[i] * d.log_probs[i];
  }
  return d;
}

CategoricalDistribution distribution_from_probs(std::vector<double> probs) {
  CategoricalDistribution d;
  d.probs = std::move(probs);
  d.logits.resize(d.probs.size());
  d.log_probs.resize(d.probs.size());
  d.entropy = 0.0;
  for (size_t i = 0; i < d.probs.size(); ++i) {
    if (!(d.probs[i] > 0.0) || !std::isfinite(d.probs[i])) {
      throw NumericError("distribution: probability must be positive finite");
    }
    d.log_probs[i] = std::log(d.probs[i]);
    d.logits[i] = d.log_probs[i];
    d.entropy -= d.probs[i] * d.log_probs[i];
  }
  return d;
}

int sample(const CategoricalDistribution& dist, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  const int n = dist.num_actions();
  for (int i = 0; i < n; ++i) {
    acc += dist.probs[i];
    if (u < acc) return i;
  }
  return n - 1;  // guard against rounding at the top end
}

}  // namespace nsrl
