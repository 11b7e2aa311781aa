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

#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <limits>
#include <vector>

#include "fedbench/autodiff/tensor.hpp"

namespace fedbench::ad {

// Handle to a node on a Tape. Only meaningful for the tape that issued it.
struct Var {
  static constexpr std::size_t kInvalid = std::numeric_limits<std::size_t>::max();
  std::size_t id = kInvalid;
  bool valid() const { return id != kInvalid; }
};

// Linear record of primitive operations. Nodes are appended in execution
// order; backward() walks them in exact reverse order and accumulates
// gradients additively at fan-out. A tape is single-use and owned by one
// thread.
class Tape {
 public:
  // Receives the node's accumulated output gradient.
  using Backprop = std::function<void(Tape&, const Tensor& grad_out)>;

  Var constant(Tensor value);
  Var parameter(Tensor value);

  const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
  // Zeros of the node's shape when nothing flowed into it.
  Tensor grad(Var v) const;

  // Seeds d(loss)/d(loss) = 1 and runs the reverse sweep. Throws
  // InvalidArgument when the loss node is not a scalar.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

  // Op-implementation surface.
  Var record(Tensor value, std::initializer_list<Var> inputs, Backprop backprop);
  // Gradient accumulator of v, allocated as zeros on first use.
  Tensor& grad_buffer(Var v);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool has_grad = false;
    Backprop backprop;
  };
  // deque: references to node values stay valid while ops append.
  std::deque<Node> nodes_;
};

// out[i,j] = sum_k x[i,k] * w[k,j] + bias[j]
Var dense(Tape& tape, Var x, Var weights, Var bias);

// Valid (unpadded) stride-1 convolution over the time axis.
// x: b x m x d, kernels: c x k x d, bias: c  ->  b x (m-k+1) x c
Var conv1d(Tape& tape, Var x, Var kernels, Var bias);

// Non-overlapping max pooling over the time axis; a trailing remainder
// shorter than `width` is dropped. x: b x t x c -> b x floor(t/width) x c
Var maxpool1d(Tape& tape, Var x, std::size_t width = 2);

Var relu(Tape& tape, Var x);
Var sigmoid(Tape& tape, Var x);
Var tanh(Tape& tape, Var x);

Var add(Tape& tape, Var a, Var b);
Var sub(Tape& tape, Var a, Var b);
Var scale(Tape& tape, Var a, double factor);
Var sum(Tape& tape, Var x);
Var reshape(Tape& tape, Var x, Shape shape);

// x: b x m x d -> b x d at time index t.
Var time_slice(Tape& tape, Var x, std::size_t t);

// Mean over all elements of (pred - target)^2. Scalar result.
Var mse_loss(Tape& tape, Var pred, Var target);

// Gate columns are laid out [input | forget | candidate | output], each of
// width z: input_weights d x 4z, recurrent_weights z x 4z, bias 4z.
struct LstmWeights {
  Var input_weights;
  Var recurrent_weights;
  Var bias;
};

struct LstmState {
  Var h;
  Var c;
};

// c' = f*c + i*g, h' = o*tanh(c') with sigmoid i, f, o and tanh g.
LstmState lstm_step(Tape& tape, Var x, LstmState state, const LstmWeights& w);

}  // namespace fedbench::ad
