#pragma once

#include <vector>

#include "nsrl/rng.hpp"

namespace nsrl {

// Discrete action distribution. probs sum to 1, every entry positive,
// entropy in nats.
struct CategoricalDistribution {
  std::vector<double> logits;
  std::vector<double> probs;
  std::vector<double> log_probs;
  double entropy = 0.0;

  int num_actions() const { return static_cast<int>(probs.size()); }
};

// Max-subtracted softmax. Throws NumericError on non-finite logits.
CategoricalDistribution distribution_from_logits(
    const std::vector<double>& logits);

// Rebuilds probs/log_probs/entropy from an explicit probability vector
// (already normalized).
CategoricalDistribution distribution_from_probs(std::vector<double> probs);

// Inverse-CDF sample; reproducible per generator state.
int sample(const CategoricalDistribution& dist, Rng& rng);

}  // namespace nsrl
