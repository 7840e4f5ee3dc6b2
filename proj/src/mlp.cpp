#include "nsrl/mlp.hpp"

#include <cmath>

#include "nsrl/errors.hpp"

namespace nsrl {

void ParameterSet::zero_grads() {
  for (LayerParams& l : layers) {
    l.w_grad.fill(0.0);
    l.b_grad.fill(0.0);
  }
}

size_t ParameterSet::num_params() const {
  size_t n = 0;
  for (const LayerParams& l : layers) n += l.w.size() + l.b.size();
  return n;
}

void ParameterSet::check_finite(const std::string& who) const {
  for (size_t i = 0; i < layers.size(); ++i) {
    if (!layers[i].w.all_finite()) {
      throw NumericError(who + ": non-finite value in layer " +
                         std::to_string(i) + " weights");
    }
    if (!layers[i].b.all_finite()) {
      throw NumericError(who + ": non-finite value in layer " +
                         std::to_string(i) + " bias");
    }
  }
}

std::vector<double> Mlp::forward(const std::vector<double>& obs) const {
  if (static_cast<int>(obs.size()) != input_dim()) {
    throw ConfigError("forward: observation length " +
                      std::to_string(obs.size()) + " != network input " +
                      std::to_string(input_dim()));
  }
  std::vector<double> cur = obs;
  std::vector<double> next;
  const size_t n_layers = params.layers.size();
  for (size_t li = 0; li < n_layers; ++li) {
    const LayerParams& l = params.layers[li];
    const int out = l.w.rows, in = l.w.cols;
    next.assign(out, 0.0);
    for (int o = 0; o < out; ++o) {
      const double* wr = l.w.row(o);
      double acc = l.b.data[o];
      for (int k = 0; k < in; ++k) acc += cur[k] * wr[k];
      next[o] = (li + 1 < n_layers) ? std::tanh(acc) : acc;
    }
    cur.swap(next);
  }
  return cur;
}

Tape::Var Mlp::forward_on_tape(Tape& tape, Tape::Var x) const {
  Tape::Var h = x;
  const size_t n_layers = params.layers.size();
  for (size_t li = 0; li < n_layers; ++li) {
    const LayerParams& l = params.layers[li];
    Tape::Var w = tape.leaf(&l.w, const_cast<Tensor*>(&l.w_grad));
    Tape::Var b = tape.leaf(&l.b, const_cast<Tensor*>(&l.b_grad));
    h = tape.linear(h, w, b);
    if (li + 1 < n_layers) h = tape.tanh_act(h);
  }
  return h;
}

Tensor orthogonal_init(int rows, int cols, double gain, Rng& rng) {
  // Orthonormalize the tall orientation via modified Gram-Schmidt, then
  // transpose back if needed.
  const bool transpose = rows < cols;
  const int m = transpose ? cols : rows;
  const int n = transpose ? rows : cols;

  Tensor a(m, n);
  for (double& v : a.data) v = rng.normal();

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      double dot = 0.0;
      for (int r = 0; r < m; ++r) dot += a.at(r, i) * a.at(r, j);
      for (int r = 0; r < m; ++r) a.at(r, j) -= dot * a.at(r, i);
    }
    double norm = 0.0;
    for (int r = 0; r < m; ++r) norm += a.at(r, j) * a.at(r, j);
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      // astronomically unlikely with gaussian fills; restart the column
      for (int r = 0; r < m; ++r) a.at(r, j) = rng.normal();
      --j;
      continue;
    }
    for (int r = 0; r < m; ++r) a.at(r, j) /= norm;
  }

  Tensor w(rows, cols);
  if (transpose) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) w.at(r, c) = gain * a.at(c, r);
    }
  } else {
    for (double& v : a.data) v *= gain;
    w = std::move(a);
  }
  return w;
}

Mlp make_mlp(const std::vector<int>& layer_sizes,
             const std::vector<double>& gains, Rng& rng) {
  if (layer_sizes.size() < 2 || gains.size() != layer_sizes.size() - 1) {
    throw ConfigError("make_mlp: need >=2 layer sizes and one gain per layer");
  }
  Mlp mlp;
  for (size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
    LayerParams l;
    const int in = layer_sizes[i], out = layer_sizes[i + 1];
    l.w = orthogonal_init(out, in, gains[i], rng);
    l.b = Tensor(1, out);
    l.w_grad = Tensor(out, in);
    l.b_grad = Tensor(1, out);
    mlp.params.layers.push_back(std::move(l));
  }
  return mlp;
}

}  // namespace nsrl
