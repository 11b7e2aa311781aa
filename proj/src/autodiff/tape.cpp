// Copyright 2026 The fedbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fedbench/autodiff/tape.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <utility>

#include "fedbench/error.hpp"

namespace fedbench::ad {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using ConstStridedMap = Eigen::Map<const RowMat, 0, Eigen::OuterStride<>>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using ConstRowVecMap = Eigen::Map<const Eigen::RowVectorXd>;

MatMap as_matrix(Tensor& t, std::size_t rows, std::size_t cols) {
  return MatMap(t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

ConstMatMap as_matrix(const Tensor& t, std::size_t rows, std::size_t cols) {
  return ConstMatMap(t.data(), static_cast<Eigen::Index>(rows),
                     static_cast<Eigen::Index>(cols));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

void require_rank(const Tensor& t, std::size_t rank, const char* op, const char* arg) {
  require(t.rank() == rank, std::string(op) + ": " + arg + " must have rank " +
                                std::to_string(rank) + ", got " +
                                shape_to_string(t.shape()));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  require(a.shape() == b.shape(), std::string(op) + ": shape mismatch " +
                                      shape_to_string(a.shape()) + " vs " +
                                      shape_to_string(b.shape()));
}

double sigmoid_scalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, false, false, {}});
  return Var{nodes_.size() - 1};
}

Var Tape::parameter(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, true, false, {}});
  return Var{nodes_.size() - 1};
}

Tensor Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.id);
  if (n.has_grad) return n.grad;
  return Tensor(n.value.shape());
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, Backprop backprop) {
  bool needs = false;
  for (Var in : inputs) needs = needs || nodes_.at(in.id).requires_grad;
  nodes_.push_back(Node{std::move(value), {}, needs, false,
                        needs ? std::move(backprop) : Backprop{}});
  return Var{nodes_.size() - 1};
}

Tensor& Tape::grad_buffer(Var v) {
  Node& n = nodes_.at(v.id);
  if (!n.has_grad) {
    n.grad = Tensor(n.value.shape());
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::backward(Var loss) {
  require(loss.valid() && loss.id < nodes_.size(), "backward: loss is not on this tape");
  require(nodes_[loss.id].value.size() == 1,
          "backward: loss must be a scalar, got shape " +
              shape_to_string(nodes_[loss.id].value.shape()));
  for (auto& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor();
  }
  grad_buffer(loss)[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.has_grad && n.backprop) n.backprop(*this, n.grad);
  }
}

Var dense(Tape& tape, Var x, Var weights, Var bias) {
  const Tensor& xv = tape.value(x);
  const Tensor& wv = tape.value(weights);
  const Tensor& bv = tape.value(bias);
  require_rank(xv, 2, "dense", "input");
  require_rank(wv, 2, "dense", "weights");
  require_rank(bv, 1, "dense", "bias");
  const std::size_t b = xv.extent(0), n = xv.extent(1), p = wv.extent(1);
  require(wv.extent(0) == n && bv.extent(0) == p,
          "dense: shape mismatch input " + shape_to_string(xv.shape()) + ", weights " +
              shape_to_string(wv.shape()) + ", bias " + shape_to_string(bv.shape()));

  Tensor out({b, p});
  auto om = as_matrix(out, b, p);
  om.noalias() = as_matrix(xv, b, n) * as_matrix(wv, n, p);
  om.rowwise() += ConstRowVecMap(bv.data(), static_cast<Eigen::Index>(p));

  return tape.record(std::move(out), {x, weights, bias},
                     [x, weights, bias, b, n, p](Tape& t, const Tensor& g) {
                       const auto gm = as_matrix(g, b, p);
                       if (t.requires_grad(x)) {
                         as_matrix(t.grad_buffer(x), b, n).noalias() +=
                             gm * as_matrix(t.value(weights), n, p).transpose();
                       }
                       if (t.requires_grad(weights)) {
                         as_matrix(t.grad_buffer(weights), n, p).noalias() +=
                             as_matrix(t.value(x), b, n).transpose() * gm;
                       }
                       if (t.requires_grad(bias)) {
                         VecMap(t.grad_buffer(bias).data(), static_cast<Eigen::Index>(p)) +=
                             gm.colwise().sum().transpose();
                       }
                     });
}

Var conv1d(Tape& tape, Var x, Var kernels, Var bias) {
  const Tensor& xv = tape.value(x);
  const Tensor& kv = tape.value(kernels);
  const Tensor& bv = tape.value(bias);
  require_rank(xv, 3, "conv1d", "input");
  require_rank(kv, 3, "conv1d", "kernels");
  require_rank(bv, 1, "conv1d", "bias");
  const std::size_t b = xv.extent(0), m = xv.extent(1), d = xv.extent(2);
  const std::size_t c = kv.extent(0), k = kv.extent(1);
  require(kv.extent(2) == d && bv.extent(0) == c,
          "conv1d: shape mismatch input " + shape_to_string(xv.shape()) + ", kernels " +
              shape_to_string(kv.shape()) + ", bias " + shape_to_string(bv.shape()));
  require(k >= 1 && k <= m, "conv1d: kernel size " + std::to_string(k) +
                                " exceeds sequence length " + std::to_string(m));
  const std::size_t steps = m - k + 1;
  const std::size_t kd = k * d;
  const auto ei = [](std::size_t v) { return static_cast<Eigen::Index>(v); };

  Tensor out({b, steps, c});
  const auto kflat = as_matrix(kv, c, kd);
  const ConstRowVecMap brow(bv.data(), ei(c));
  for (std::size_t i = 0; i < b; ++i) {
    // Row t of the strided view is input[i, t:t+k, :] flattened.
    ConstStridedMap cols(xv.data() + i * m * d, ei(steps), ei(kd), Eigen::OuterStride<>(ei(d)));
    MatMap oi(out.data() + i * steps * c, ei(steps), ei(c));
    oi.noalias() = cols * kflat.transpose();
    oi.rowwise() += brow;
  }

  return tape.record(
      std::move(out), {x, kernels, bias},
      [=](Tape& t, const Tensor& g) {
        const Tensor& xval = t.value(x);
        const auto kf = as_matrix(t.value(kernels), c, kd);
        const bool gx = t.requires_grad(x), gk = t.requires_grad(kernels),
                   gb = t.requires_grad(bias);
        RowMat dcols;
        for (std::size_t i = 0; i < b; ++i) {
          ConstMatMap gi(g.data() + i * steps * c, ei(steps), ei(c));
          if (gk) {
            ConstStridedMap cols(xval.data() + i * m * d, ei(steps), ei(kd),
                                 Eigen::OuterStride<>(ei(d)));
            as_matrix(t.grad_buffer(kernels), c, kd).noalias() += gi.transpose() * cols;
          }
          if (gx) {
            dcols.noalias() = gi * kf;
            double* dx = t.grad_buffer(x).data() + i * m * d;
            for (std::size_t s = 0; s < steps; ++s) {
              const double* row = dcols.data() + s * kd;
              double* dst = dx + s * d;
              for (std::size_t q = 0; q < kd; ++q) dst[q] += row[q];
            }
          }
          if (gb) {
            VecMap(t.grad_buffer(bias).data(), ei(c)) += gi.colwise().sum().transpose();
          }
        }
      });
}

Var maxpool1d(Tape& tape, Var x, std::size_t width) {
  const Tensor& xv = tape.value(x);
  require_rank(xv, 3, "maxpool1d", "input");
  require(width >= 1, "maxpool1d: width must be positive");
  const std::size_t b = xv.extent(0), steps = xv.extent(1), c = xv.extent(2);
  const std::size_t pooled = steps / width;
  require(pooled >= 1, "maxpool1d: sequence of length " + std::to_string(steps) +
                           " too short for width " + std::to_string(width));
  Tensor out({b, pooled, c});
  std::vector<std::size_t> argmax(out.size());
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t p = 0; p < pooled; ++p) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        std::size_t best = (i * steps + p * width) * c + ch;
        for (std::size_t w = 1; w < width; ++w) {
          const std::size_t idx = (i * steps + p * width + w) * c + ch;
          if (xv[idx] > xv[best]) best = idx;
        }
        const std::size_t o = (i * pooled + p) * c + ch;
        out[o] = xv[best];
        argmax[o] = best;
      }
    }
  }
  return tape.record(std::move(out), {x},
                     [x, argmax = std::move(argmax)](Tape& t, const Tensor& g) {
                       Tensor& dx = t.grad_buffer(x);
                       for (std::size_t o = 0; o < argmax.size(); ++o) dx[argmax[o]] += g[o];
                     });
}

Var relu(Tape& tape, Var x) {
  Tensor out = tape.value(x);
  for (auto& v : out.values()) v = v > 0.0 ? v : 0.0;
  return tape.record(std::move(out), {x}, [x](Tape& t, const Tensor& g) {
    const Tensor& xv = t.value(x);
    Tensor& dx = t.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (xv[i] > 0.0) dx[i] += g[i];
    }
  });
}

Var sigmoid(Tape& tape, Var x) {
  Tensor out = tape.value(x);
  for (auto& v : out.values()) v = sigmoid_scalar(v);
  const Var y{tape.size()};
  return tape.record(std::move(out), {x}, [x, y](Tape& t, const Tensor& g) {
    const Tensor& yv = t.value(y);
    Tensor& dx = t.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * yv[i] * (1.0 - yv[i]);
  });
}

Var tanh(Tape& tape, Var x) {
  Tensor out = tape.value(x);
  for (auto& v : out.values()) v = std::tanh(v);
  const Var y{tape.size()};
  return tape.record(std::move(out), {x}, [x, y](Tape& t, const Tensor& g) {
    const Tensor& yv = t.value(y);
    Tensor& dx = t.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * (1.0 - yv[i] * yv[i]);
  });
}

Var add(Tape& tape, Var a, Var b) {
  const Tensor& av = tape.value(a);
  const Tensor& bv = tape.value(b);
  require_same_shape(av, bv, "add");
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return tape.record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    for (Var v : {a, b}) {
      if (!t.requires_grad(v)) continue;
      Tensor& d = t.grad_buffer(v);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
    }
  });
}

Var sub(Tape& tape, Var a, Var b) {
  const Tensor& av = tape.value(a);
  const Tensor& bv = tape.value(b);
  require_same_shape(av, bv, "sub");
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return tape.record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    if (t.requires_grad(a)) {
      Tensor& d = t.grad_buffer(a);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
    }
    if (t.requires_grad(b)) {
      Tensor& d = t.grad_buffer(b);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] -= g[i];
    }
  });
}

Var scale(Tape& tape, Var a, double factor) {
  Tensor out = tape.value(a);
  for (auto& v : out.values()) v *= factor;
  return tape.record(std::move(out), {a}, [a, factor](Tape& t, const Tensor& g) {
    Tensor& d = t.grad_buffer(a);
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += factor * g[i];
  });
}

Var sum(Tape& tape, Var x) {
  double total = 0.0;
  for (double v : tape.value(x).values()) total += v;
  return tape.record(Tensor::scalar(total), {x}, [x](Tape& t, const Tensor& g) {
    Tensor& d = t.grad_buffer(x);
    for (auto& v : d.values()) v += g[0];
  });
}

Var reshape(Tape& tape, Var x, Shape shape) {
  const Tensor& xv = tape.value(x);
  require(shape_size(shape) == xv.size(), "reshape: cannot view " +
                                              shape_to_string(xv.shape()) + " as " +
                                              shape_to_string(shape));
  return tape.record(xv.reshaped(std::move(shape)), {x}, [x](Tape& t, const Tensor& g) {
    Tensor& d = t.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
  });
}

Var time_slice(Tape& tape, Var x, std::size_t step) {
  const Tensor& xv = tape.value(x);
  require_rank(xv, 3, "time_slice", "input");
  const std::size_t b = xv.extent(0), m = xv.extent(1), d = xv.extent(2);
  require(step < m, "time_slice: index out of range");
  Tensor out({b, d});
  for (std::size_t i = 0; i < b; ++i) {
    std::copy_n(xv.data() + (i * m + step) * d, d, out.data() + i * d);
  }
  return tape.record(std::move(out), {x}, [x, b, m, d, step](Tape& t, const Tensor& g) {
    Tensor& dx = t.grad_buffer(x);
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t v = 0; v < d; ++v) dx[(i * m + step) * d + v] += g[i * d + v];
    }
  });
}

Var mse_loss(Tape& tape, Var pred, Var target) {
  const Tensor& pv = tape.value(pred);
  const Tensor& tv = tape.value(target);
  require_same_shape(pv, tv, "mse_loss");
  require(pv.size() > 0, "mse_loss: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double diff = pv[i] - tv[i];
    acc += diff * diff;
  }
  const double n = static_cast<double>(pv.size());
  return tape.record(Tensor::scalar(acc / n), {pred, target},
                     [pred, target, n](Tape& t, const Tensor& g) {
                       const Tensor& p = t.value(pred);
                       const Tensor& q = t.value(target);
                       const double coef = 2.0 * g[0] / n;
                       if (t.requires_grad(pred)) {
                         Tensor& d = t.grad_buffer(pred);
                         for (std::size_t i = 0; i < p.size(); ++i) d[i] += coef * (p[i] - q[i]);
                       }
                       if (t.requires_grad(target)) {
                         Tensor& d = t.grad_buffer(target);
                         for (std::size_t i = 0; i < p.size(); ++i) d[i] -= coef * (p[i] - q[i]);
                       }
                     });
}

LstmState lstm_step(Tape& tape, Var x, LstmState state, const LstmWeights& w) {
  const Tensor& xv = tape.value(x);
  const Tensor& hv = tape.value(state.h);
  const Tensor& cv = tape.value(state.c);
  const Tensor& wx = tape.value(w.input_weights);
  const Tensor& wh = tape.value(w.recurrent_weights);
  const Tensor& bv = tape.value(w.bias);
  require_rank(xv, 2, "lstm_step", "x");
  require_rank(hv, 2, "lstm_step", "h");
  require_rank(wx, 2, "lstm_step", "input_weights");
  require_rank(wh, 2, "lstm_step", "recurrent_weights");
  require_rank(bv, 1, "lstm_step", "bias");
  const std::size_t b = xv.extent(0), d = xv.extent(1), z = hv.extent(1);
  const std::size_t z4 = 4 * z;
  require(hv.extent(0) == b && cv.shape() == hv.shape() && wx.extent(0) == d &&
              wx.extent(1) == z4 && wh.extent(0) == z && wh.extent(1) == z4 &&
              bv.extent(0) == z4,
          "lstm_step: shape mismatch x " + shape_to_string(xv.shape()) + ", h " +
              shape_to_string(hv.shape()) + ", c " + shape_to_string(cv.shape()) +
              ", input_weights " + shape_to_string(wx.shape()) + ", recurrent_weights " +
              shape_to_string(wh.shape()) + ", bias " + shape_to_string(bv.shape()));

  // Activated gates [i | f | g | o].
  Tensor gates({b, z4});
  auto gm = as_matrix(gates, b, z4);
  gm.noalias() = as_matrix(xv, b, d) * as_matrix(wx, d, z4);
  gm.noalias() += as_matrix(hv, b, z) * as_matrix(wh, z, z4);
  gm.rowwise() += ConstRowVecMap(bv.data(), static_cast<Eigen::Index>(z4));
  for (std::size_t i = 0; i < b; ++i) {
    double* row = gates.data() + i * z4;
    for (std::size_t j = 0; j < z4; ++j) {
      row[j] = (j >= 2 * z && j < 3 * z) ? std::tanh(row[j]) : sigmoid_scalar(row[j]);
    }
  }
  const LstmWeights wc = w;
  const Var h = state.h;
  const Var gvar{tape.size()};
  tape.record(std::move(gates), {x, h, w.input_weights, w.recurrent_weights, w.bias},
              [=](Tape& t, const Tensor& dg) {
                const Tensor& ga = t.value(gvar);
                RowMat dpre(b, z4);
                for (std::size_t i = 0; i < b; ++i) {
                  for (std::size_t j = 0; j < z4; ++j) {
                    const double a = ga[i * z4 + j];
                    const double deriv =
                        (j >= 2 * z && j < 3 * z) ? 1.0 - a * a : a * (1.0 - a);
                    dpre(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        dg[i * z4 + j] * deriv;
                  }
                }
                if (t.requires_grad(x)) {
                  as_matrix(t.grad_buffer(x), b, d).noalias() +=
                      dpre * as_matrix(t.value(wc.input_weights), d, z4).transpose();
                }
                if (t.requires_grad(h)) {
                  as_matrix(t.grad_buffer(h), b, z).noalias() +=
                      dpre * as_matrix(t.value(wc.recurrent_weights), z, z4).transpose();
                }
                if (t.requires_grad(wc.input_weights)) {
                  as_matrix(t.grad_buffer(wc.input_weights), d, z4).noalias() +=
                      as_matrix(t.value(x), b, d).transpose() * dpre;
                }
                if (t.requires_grad(wc.recurrent_weights)) {
                  as_matrix(t.grad_buffer(wc.recurrent_weights), z, z4).noalias() +=
                      as_matrix(t.value(h), b, z).transpose() * dpre;
                }
                if (t.requires_grad(wc.bias)) {
                  VecMap(t.grad_buffer(wc.bias).data(), static_cast<Eigen::Index>(z4)) +=
                      dpre.colwise().sum().transpose();
                }
              });

  const Var c = state.c;
  const Tensor& ga = tape.value(gvar);
  Tensor cnext({b, z});
  for (std::size_t i = 0; i < b; ++i) {
    const double* row = ga.data() + i * z4;
    for (std::size_t j = 0; j < z; ++j) {
      cnext[i * z + j] = row[z + j] * cv[i * z + j] + row[j] * row[2 * z + j];
    }
  }
  const Var cvar = tape.record(std::move(cnext), {gvar, c}, [=](Tape& t, const Tensor& dc) {
    const Tensor& g = t.value(gvar);
    const Tensor& cp = t.value(c);
    if (t.requires_grad(gvar)) {
      Tensor& dgates = t.grad_buffer(gvar);
      for (std::size_t i = 0; i < b; ++i) {
        const double* row = g.data() + i * z4;
        double* drow = dgates.data() + i * z4;
        for (std::size_t j = 0; j < z; ++j) {
          const double up = dc[i * z + j];
          drow[j] += up * row[2 * z + j];
          drow[z + j] += up * cp[i * z + j];
          drow[2 * z + j] += up * row[j];
        }
      }
    }
    if (t.requires_grad(c)) {
      Tensor& dcp = t.grad_buffer(c);
      for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < z; ++j) {
          dcp[i * z + j] += dc[i * z + j] * g[i * z4 + z + j];
        }
      }
    }
  });

  const Tensor& cn = tape.value(cvar);
  Tensor hnext({b, z});
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < z; ++j) {
      hnext[i * z + j] = ga[i * z4 + 3 * z + j] * std::tanh(cn[i * z + j]);
    }
  }
  const Var hvar = tape.record(std::move(hnext), {gvar, cvar}, [=](Tape& t, const Tensor& dh) {
    const Tensor& g = t.value(gvar);
    const Tensor& cc = t.value(cvar);
    Tensor* dgates = t.requires_grad(gvar) ? &t.grad_buffer(gvar) : nullptr;
    Tensor& dcell = t.grad_buffer(cvar);
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t j = 0; j < z; ++j) {
        const double th = std::tanh(cc[i * z + j]);
        const double up = dh[i * z + j];
        if (dgates) (*dgates)[i * z4 + 3 * z + j] += up * th;
        dcell[i * z + j] += up * g[i * z4 + 3 * z + j] * (1.0 - th * th);
      }
    }
  });
  return LstmState{hvar, cvar};
}

}  // namespace fedbench::ad
