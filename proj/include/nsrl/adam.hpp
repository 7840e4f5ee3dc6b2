#pragma once

#include <vector>

#include "nsrl/mlp.hpp"
#include "nsrl/tensor.hpp"

namespace nsrl {

// Adam moment buffers, shaped like the parameter set they update.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-5;
  long long t = 0;
  std::vector<Tensor> m;  // first moments, one per tensor (w0,b0,w1,b1,...)
  std::vector<Tensor> v;  // second moments
};

AdamState make_adam_state(const ParameterSet& params);

// Global gradient-norm clip followed by a bias-corrected Adam step.
// Gradients are zeroed after the step; parameters are checked finite.
// Throws NumericError (naming the offending tensor) on NaN gradients.
void adam_update(ParameterSet& params, AdamState& state, double lr,
                 double max_grad_norm);

// L2 norm over every gradient buffer in the set.
double global_grad_norm(const ParameterSet& params);

}  // namespace nsrl
