#include "nsrl/adam.hpp"

#include <cmath>

#include "nsrl/errors.hpp"

namespace nsrl {

AdamState make_adam_state(const ParameterSet& params) {
  AdamState s;
  for (const LayerParams& l : params.layers) {
    s.m.push_back(Tensor(l.w.rows, l.w.cols));
    s.m.push_back(Tensor(l.b.rows, l.b.cols));
    s.v.push_back(Tensor(l.w.rows, l.w.cols));
    s.v.push_back(Tensor(l.b.rows, l.b.cols));
  }
  return s;
}

double global_grad_norm(const ParameterSet& params) {
  double sq = 0.0;
  for (const LayerParams& l : params.layers) {
    for (double g : l.w_grad.data) sq += g * g;
    for (double g : l.b_grad.data) sq += g * g;
  }
  return std::sqrt(sq);
}

namespace {

void adam_step_tensor(Tensor& p, Tensor& g, Tensor& m, Tensor& v,
                      const AdamState& s, double lr, double clip_scale,
                      double bc1, double bc2, const std::string& name) {
  for (size_t i = 0; i < p.size(); ++i) {
    const double grad = g.data[i] * clip_scale;
    if (!std::isfinite(grad)) {
      throw NumericError("adam_update: non-finite gradient in " + name);
    }
    m.data[i] = s.beta1 * m.data[i] + (1.0 - s.beta1) * grad;
    v.data[i] = s.beta2 * v.data[i] + (1.0 - s.beta2) * grad * grad;
    const double mhat = m.data[i] / bc1;
    const double vhat = v.data[i] / bc2;
    p.data[i] -= lr * mhat / (std::sqrt(vhat) + s.eps);
  }
  g.fill(0.0);
}

}  // namespace

void adam_update(ParameterSet& params, AdamState& state, double lr,
                 double max_grad_norm) {
  const double norm = global_grad_norm(params);
  if (!std::isfinite(norm)) {
    // locate the offender for a useful message
    for (size_t i = 0; i < params.layers.size(); ++i) {
      if (!params.layers[i].w_grad.all_finite()) {
        throw NumericError("adam_update: non-finite gradient in layer " +
                           std::to_string(i) + " weights");
      }
      if (!params.layers[i].b_grad.all_finite()) {
        throw NumericError("adam_update: non-finite gradient in layer " +
                           std::to_string(i) + " bias");
      }
    }
    throw NumericError("adam_update: non-finite gradient norm");
  }
  double clip_scale = 1.0;
  if (max_grad_norm > 0.0 && norm > max_grad_norm) {
    clip_scale = max_grad_norm / norm;
  }

  state.t += 1;
  params.opt_step = state.t;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));

  size_t slot = 0;
  for (size_t i = 0; i < params.layers.size(); ++i) {
    LayerParams& l = params.layers[i];
    adam_step_tensor(l.w, l.w_grad, state.m[slot], state.v[slot], state, lr,
                     clip_scale, bc1, bc2, "layer " + std::to_string(i) + " w");
    ++slot;
    adam_step_tensor(l.b, l.b_grad, state.m[slot], state.v[slot], state, lr,
                     clip_scale, bc1, bc2, "layer " + std::to_string(i) + " b");
    ++slot;
  }
  params.check_finite("adam_update");
}

}  // namespace nsrl
