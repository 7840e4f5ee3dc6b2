#include "nsrl/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "nsrl/errors.hpp"

namespace nsrl {

Tape::Var Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Var>(nodes_.size() - 1);
}

Tape::Var Tape::constant(Tensor v) {
  Node n;
  n.op = Op::kConstant;
  n.value = std::move(v);
  return push(std::move(n));
}

Tape::Var Tape::leaf(const Tensor* value, Tensor* grad) {
  if (!value || !grad || !value->same_shape(*grad)) {
    throw UsageError("leaf: value/grad missing or shape mismatch");
  }
  Node n;
  n.op = Op::kLeaf;
  n.value = *value;
  n.ext_value = value;
  n.ext_grad = grad;
  return push(std::move(n));
}

Tape::Var Tape::linear(Var x, Var w, Var b) {
  const Tensor& xv = val(x);
  const Tensor& wv = val(w);
  const Tensor& bv = val(b);
  if (xv.cols != wv.cols || bv.rows != 1 || bv.cols != wv.rows) {
    throw ConfigError("linear: dimension mismatch, x=" + shape_str(xv) +
                      " w=" + shape_str(wv) + " b=" + shape_str(bv));
  }
  Node n;
  n.op = Op::kLinear;
  n.p0 = x;
  n.p1 = w;
  n.p2 = b;
  n.value = Tensor(xv.rows, wv.rows);
  const int m = xv.rows, in = xv.cols, out = wv.rows;
  for (int i = 0; i < m; ++i) {
    const double* xr = xv.row(i);
    double* yr = n.value.row(i);
    for (int o = 0; o < out; ++o) {
      const double* wr = wv.row(o);
      double acc = bv.data[o];
      for (int k = 0; k < in; ++k) acc += xr[k] * wr[k];
      yr[o] = acc;
    }
  }
  return push(std::move(n));
}

Tape::Var Tape::tanh_act(Var x) {
  Node n;
  n.op = Op::kTanh;
  n.p0 = x;
  n.value = val(x);
  for (double& v : n.value.data) v = std::tanh(v);
  return push(std::move(n));
}

Tape::Var Tape::log_softmax_rows(Var x) {
  Node n;
  n.op = Op::kLogSoftmax;
  n.p0 = x;
  const Tensor& xv = val(x);
  n.value = Tensor(xv.rows, xv.cols);
  for (int i = 0; i < xv.rows; ++i) {
    const double* r = xv.row(i);
    double* o = n.value.row(i);
    double mx = r[0];
    for (int k = 1; k < xv.cols; ++k) mx = std::max(mx, r[k]);
    double z = 0.0;
    for (int k = 0; k < xv.cols; ++k) z += std::exp(r[k] - mx);
    const double lz = std::log(z) + mx;
    for (int k = 0; k < xv.cols; ++k) o[k] = r[k] - lz;
  }
  return push(std::move(n));
}

Tape::Var Tape::entropy_from_log_probs(Var lp) {
  Node n;
  n.op = Op::kEntropy;
  n.p0 = lp;
  const Tensor& v = val(lp);
  n.value = Tensor(v.rows, 1);
  for (int i = 0; i < v.rows; ++i) {
    const double* r = v.row(i);
    double h = 0.0;
    for (int k = 0; k < v.cols; ++k) h -= std::exp(r[k]) * r[k];
    n.value.data[i] = h;
  }
  return push(std::move(n));
}

Tape::Var Tape::gather_cols(Var x, std::vector<int> idx) {
  const Tensor& xv = val(x);
  if (static_cast<int>(idx.size()) != xv.rows) {
    throw UsageError("gather_cols: index count != rows");
  }
  Node n;
  n.op = Op::kGather;
  n.p0 = x;
  n.idx = std::move(idx);
  n.value = Tensor(xv.rows, 1);
  for (int i = 0; i < xv.rows; ++i) n.value.data[i] = xv.at(i, n.idx[i]);
  return push(std::move(n));
}

Tape::Var Tape::add(Var a, Var b) {
  if (!val(a).same_shape(val(b))) throw UsageError("add: shape mismatch");
  Node n;
  n.op = Op::kAdd;
  n.p0 = a;
  n.p1 = b;
  n.value = val(a);
  const Tensor& bv = val(b);
  for (size_t i = 0; i < n.value.size(); ++i) n.value.data[i] += bv.data[i];
  return push(std::move(n));
}

Tape::Var Tape::sub(Var a, Var b) {
  if (!val(a).same_shape(val(b))) throw UsageError("sub: shape mismatch");
  Node n;
  n.op = Op::kSub;
  n.p0 = a;
  n.p1 = b;
  n.value = val(a);
  const Tensor& bv = val(b);
  for (size_t i = 0; i < n.value.size(); ++i) n.value.data[i] -= bv.data[i];
  return push(std::move(n));
}

Tape::Var Tape::mul(Var a, Var b) {
  if (!val(a).same_shape(val(b))) throw UsageError("mul: shape mismatch");
  Node n;
  n.op = Op::kMul;
  n.p0 = a;
  n.p1 = b;
  n.value = val(a);
  const Tensor& bv = val(b);
  for (size_t i = 0; i < n.value.size(); ++i) n.value.data[i] *= bv.data[i];
  return push(std::move(n));
}

Tape::Var Tape::scale(Var a, double s) {
  Node n;
  n.op = Op::kScale;
  n.p0 = a;
  n.a = s;
  n.value = val(a);
  for (double& v : n.value.data) v *= s;
  return push(std::move(n));
}

Tape::Var Tape::add_scalar(Var a, double s) {
  Node n;
  n.op = Op::kAddScalar;
  n.p0 = a;
  n.a = s;
  n.value = val(a);
  for (double& v : n.value.data) v += s;
  return push(std::move(n));
}

Tape::Var Tape::exp_elem(Var a) {
  Node n;
  n.op = Op::kExp;
  n.p0 = a;
  n.value = val(a);
  for (double& v : n.value.data) v = std::exp(v);
  return push(std::move(n));
}

Tape::Var Tape::square(Var a) {
  Node n;
  n.op = Op::kSquare;
  n.p0 = a;
  n.value = val(a);
  for (double& v : n.value.data) v *= v;
  return push(std::move(n));
}

Tape::Var Tape::clamp(Var a, double lo, double hi) {
  Node n;
  n.op = Op::kClamp;
  n.p0 = a;
  n.a = lo;
  n.b = hi;
  n.value = val(a);
  for (double& v : n.value.data) v = std::clamp(v, lo, hi);
  return push(std::move(n));
}

Tape::Var Tape::minimum(Var a, Var b) {
  if (!val(a).same_shape(val(b))) throw UsageError("minimum: shape mismatch");
  Node n;
  n.op = Op::kMin;
  n.p0 = a;
  n.p1 = b;
  n.value = val(a);
  const Tensor& bv = val(b);
  for (size_t i = 0; i < n.value.size(); ++i) {
    n.value.data[i] = std::min(n.value.data[i], bv.data[i]);
  }
  return push(std::move(n));
}

Tape::Var Tape::maximum(Var a, Var b) {
  if (!val(a).same_shape(val(b))) throw UsageError("maximum: shape mismatch");
  Node n;
  n.op = Op::kMax;
  n.p0 = a;
  n.p1 = b;
  n.value = val(a);
  const Tensor& bv = val(b);
  for (size_t i = 0; i < n.value.size(); ++i) {
    n.value.data[i] = std::max(n.value.data[i], bv.data[i]);
  }
  return push(std::move(n));
}

Tape::Var Tape::mean_all(Var a) {
  Node n;
  n.op = Op::kMean;
  n.p0 = a;
  n.value = Tensor(1, 1);
  double acc = 0.0;
  for (double v : val(a).data) acc += v;
  n.value.data[0] = acc / static_cast<double>(val(a).size());
  return push(std::move(n));
}

Tape::Var Tape::sum_all(Var a) {
  Node n;
  n.op = Op::kSum;
  n.p0 = a;
  n.value = Tensor(1, 1);
  double acc = 0.0;
  for (double v : val(a).data) acc += v;
  n.value.data[0] = acc;
  return push(std::move(n));
}

double Tape::scalar(Var v) const {
  const Tensor& t = val(v);
  if (t.rows != 1 || t.cols != 1) throw UsageError("scalar: node is not 1x1");
  return t.data[0];
}

void Tape::backward(Var loss) {
  if (nodes_.empty() || loss < 0 || loss >= static_cast<int>(nodes_.size())) {
    throw UsageError("backward called without a recorded forward pass");
  }
  Node& ln = nodes_[loss];
  if (ln.value.rows != 1 || ln.value.cols != 1) {
    throw UsageError("backward: loss must be scalar, got " +
                     shape_str(ln.value));
  }
  for (Node& n : nodes_) {
    n.grad = Tensor(n.value.rows, n.value.cols);
  }
  ln.grad.data[0] = 1.0;

  for (int i = loss; i >= 0; --i) {
    Node& n = nodes_[i];
    const Tensor& g = n.grad;
    switch (n.op) {
      case Op::kConstant:
        break;
      case Op::kLeaf:
        for (size_t k = 0; k < g.size(); ++k) {
          n.ext_grad->data[k] += g.data[k];
        }
        break;
      case Op::kLinear: {
        Node& xn = nodes_[n.p0];
        Node& wn = nodes_[n.p1];
        Node& bn = nodes_[n.p2];
        const Tensor& xv = xn.value;
        const Tensor& wv = wn.value;
        const int m = xv.rows, in = xv.cols, out = wv.rows;
        for (int r = 0; r < m; ++r) {
          const double* gr = g.row(r);
          const double* xr = xv.row(r);
          double* dxr = xn.grad.row(r);
          for (int o = 0; o < out; ++o) {
            const double go = gr[o];
            if (go == 0.0) continue;
            const double* wr = wv.row(o);
            double* dwr = wn.grad.row(o);
            for (int k = 0; k < in; ++k) {
              dxr[k] += go * wr[k];
              dwr[k] += go * xr[k];
            }
            bn.grad.data[o] += go;
          }
        }
        break;
      }
      case Op::kTanh: {
        Node& xn = nodes_[n.p0];
        for (size_t k = 0; k < g.size(); ++k) {
          const double y = n.value.data[k];
          xn.grad.data[k] += g.data[k] * (1.0 - y * y);
        }
        break;
      }
      case Op::kLogSoftmax: {
        // dx = dy - softmax * rowsum(dy)
        Node& xn = nodes_[n.p0];
        const int m = n.value.rows, kk = n.value.cols;
        for (int r = 0; r < m; ++r) {
          const double* gr = g.row(r);
          const double* yr = n.value.row(r);
          double* dxr = xn.grad.row(r);
          double gsum = 0.0;
          for (int k = 0; k < kk; ++k) gsum += gr[k];
          for (int k = 0; k < kk; ++k) {
            dxr[k] += gr[k] - std::exp(yr[k]) * gsum;
          }
        }
        break;
      }
      case Op::kEntropy: {
        // dH/dlp_k = -exp(lp_k) * (lp_k + 1)
        Node& xn = nodes_[n.p0];
        const Tensor& lp = xn.value;
        for (int r = 0; r < lp.rows; ++r) {
          const double gh = g.data[r];
          if (gh == 0.0) continue;
          const double* lr = lp.row(r);
          double* dxr = xn.grad.row(r);
          for (int k = 0; k < lp.cols; ++k) {
            dxr[k] -= gh * std::exp(lr[k]) * (lr[k] + 1.0);
          }
        }
        break;
      }
      case Op::kGather: {
        Node& xn = nodes_[n.p0];
        for (int r = 0; r < n.value.rows; ++r) {
          xn.grad.at(r, n.idx[r]) += g.data[r];
        }
        break;
      }
      case Op::kAdd: {
        Node& an = nodes_[n.p0];
        Node& bn = nodes_[n.p1];
        for (size_t k = 0; k < g.size(); ++k) {
          an.grad.data[k] += g.data[k];
          bn.grad.data[k] += g.data[k];
        }
        break;
      }
      case Op::kSub: {
        Node& an = nodes_[n.p0];
        Node& bn = nodes_[n.p1];
        for (size_t k = 0; k < g.size(); ++k) {
          an.grad.data[k] += g.data[k];
          bn.grad.data[k] -= g.data[k];
        }
        break;
      }
      case Op::kMul: {
        Node& an = nodes_[n.p0];
        Node& bn = nodes_[n.p1];
        for (size_t k = 0; k < g.size(); ++k) {
          an.grad.data[k] += g.data[k] * bn.value.data[k];
          bn.grad.data[k] += g.data[k] * an.value.data[k];
        }
        break;
      }
      case Op::kScale: {
        Node& an = nodes_[n.p0];
        for (size_t k = 0; k < g.size(); ++k) {
          an.grad.data[k] += g.data[k] * n.a;
        }
        break;
      }
      case Op::kAddScalar: {
        Node& an = nodes_[n.p0];
        for (size_t k = 0; k < g.size(); ++k) an.grad.data[k] += g.data[k];
        break;
      }
      case Op::kExp: {
        Node& an = nodes_[n.p0];
        for (size_t k = 0; k < g.size(); ++k) {
          an.grad.data[k] += g.data[k] * n.value.data[k];
        }
        break;
      }
      case Op::kSquare: {
        Node& an = nodes_[n.p0];
        for (size_t k = 0; k < g.size(); ++k) {
          an.grad.data[k] += g.data[k] * 2.0 * an.value.data[k];
        }
        break;
      }
      case Op::kClamp: {
        Node& an = nodes_[n.p0];
        for (size_t k = 0; k < g.size(); ++k) {
          const double x = an.value.data[k];
          if (x > n.a && x < n.b) an.grad.data[k] += g.data[k];
        }
        break;
      }
      case Op::kMin: {
        // ties route to the first argument
        Node& an = nodes_[n.p0];
        Node& bn = nodes_[n.p1];
        for (size_t k = 0; k < g.size(); ++k) {
          if (an.value.data[k] <= bn.value.data[k]) {
            an.grad.data[k] += g.data[k];
          } else {
            bn.grad.data[k] += g.data[k];
          }
        }
        break;
      }
      case Op::kMax: {
        Node& an = nodes_[n.p0];
        Node& bn = nodes_[n.p1];
        for (size_t k = 0; k < g.size(); ++k) {
          if (an.value.data[k] >= bn.value.data[k]) {
            an.grad.data[k] += g.data[k];
          } else {
            bn.grad.data[k] += g.data[k];
          }
        }
        break;
      }
      case Op::kMean: {
        Node& an = nodes_[n.p0];
        const double s = g.data[0] / static_cast<double>(an.value.size());
        for (size_t k = 0; k < an.grad.size(); ++k) an.grad.data[k] += s;
        break;
      }
      case Op::kSum: {
        Node& an = nodes_[n.p0];
        const double s = g.data[0];
        for (size_t k = 0; k < an.grad.size(); ++k) an.grad.data[k] += s;
        break;
      }
    }
  }
}

}  // namespace nsrl
