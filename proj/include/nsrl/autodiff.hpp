#pragma once

#include <vector>

#include "nsrl/tensor.hpp"

namespace nsrl {

// Reverse-mode tape over dense matrices. A forward pass records nodes;
// backward() walks them in reverse and accumulates gradients into the
// tensors bound via leaf(). Nodes are matrix-level (a whole linear layer or
// activation is one node), so graphs stay small and inner loops stay dense.
class Tape {
 public:
  using Var = int;

  // Constant input; no gradient is propagated into it.
  Var constant(Tensor v);
  // Leaf bound to external storage; after backward() the accumulated
  // gradient is added into *grad. Both pointers must outlive the tape pass.
  Var leaf(const Tensor* value, Tensor* grad);

  // y = x * W^T + b, with x: MxIn, w: OutxIn, b: 1xOut -> MxOut.
  Var linear(Var x, Var w, Var b);
  Var tanh_act(Var x);
  // Row-wise log softmax (numerically stable, max-subtracted).
  Var log_softmax_rows(Var x);
  // H_m = -sum_k exp(lp[m,k]) * lp[m,k], MxK -> Mx1.
  Var entropy_from_log_probs(Var lp);
  // out[m,0] = x[m, idx[m]], MxK -> Mx1.
  Var gather_cols(Var x, std::vector<int> idx);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise, same shape
  Var scale(Var a, double s);
  Var add_scalar(Var a, double s);
  Var exp_elem(Var a);
  Var square(Var a);
  Var clamp(Var a, double lo, double hi);
  Var minimum(Var a, Var b);
  Var maximum(Var a, Var b);
  Var mean_all(Var a);  // -> 1x1
  Var sum_all(Var a);   // -> 1x1

  const Tensor& value(Var v) const { return nodes_[v].value; }
  double scalar(Var v) const;

  // Seeds d(loss)/d(loss) = 1 and accumulates into every reachable leaf.
  // loss must be a 1x1 node produced by this tape.
  void backward(Var loss);

  size_t num_nodes() const { return nodes_.size(); }

 private:
  enum class Op {
    kConstant,
    kLeaf,
    kLinear,
    kTanh,
    kLogSoftmax,
    kEntropy,
    kGather,
    kAdd,
    kSub,
    kMul,
    kScale,
    kAddScalar,
    kExp,
    kSquare,
    kClamp,
    kMin,
    kMax,
    kMean,
    kSum,
  };

  struct Node {
    Op op;
    Tensor value;
    Tensor grad;
    int p0 = -1;
    int p1 = -1;
    int p2 = -1;
    double a = 0.0;
    double b = 0.0;
    std::vector<int> idx;
    const Tensor* ext_value = nullptr;
    Tensor* ext_grad = nullptr;
  };

  Var push(Node n);
  const Tensor& val(Var v) const { return nodes_[v].value; }

  std::vector<Node> nodes_;
};

}  // namespace nsrl
