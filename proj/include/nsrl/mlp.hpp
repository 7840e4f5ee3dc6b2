#pragma once

#include <string>
#include <vector>

#include "nsrl/autodiff.hpp"
#include "nsrl/rng.hpp"
#include "nsrl/tensor.hpp"

namespace nsrl {

struct LayerParams {
  Tensor w;       // out x in
  Tensor b;       // 1 x out
  Tensor w_grad;  // same shapes as the parameters
  Tensor b_grad;
};

// Flat parameter collection for one network: weights, biases, paired
// gradient buffers, and the optimizer step counter.
struct ParameterSet {
  std::vector<LayerParams> layers;
  long long opt_step = 0;

  void zero_grads();
  size_t num_params() const;
  // Hard error on any non-finite parameter value.
  void check_finite(const std::string& who) const;
};

// Feedforward net: tanh on every layer except the last (linear head).
struct Mlp {
  ParameterSet params;

  int input_dim() const { return params.layers.front().w.cols; }
  int output_dim() const { return params.layers.back().w.rows; }

  // Fast inference path, no gradient bookkeeping. obs.size() must equal
  // input_dim().
  std::vector<double> forward(const std::vector<double>& obs) const;

  // Tape-tracked batched forward; x is an M x input_dim node.
  Tape::Var forward_on_tape(Tape& tape, Tape::Var x) const;
};

// Orthogonal rows/columns scaled by gain, zero biases. `gains` has one
// entry per layer; standard PPO practice is sqrt(2) for hidden layers and
// a small gain for the policy head.
Mlp make_mlp(const std::vector<int>& layer_sizes,
             const std::vector<double>& gains, Rng& rng);

Tensor orthogonal_init(int rows, int cols, double gain, Rng& rng);

}  // namespace nsrl
