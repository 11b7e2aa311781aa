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

// Central finite-difference gradient oracle for tape-built scalar functions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fedbench/autodiff/tape.hpp"

namespace oracle {

using fedbench::ad::Tape;
using fedbench::ad::Tensor;
using fedbench::ad::Var;

// Builds a scalar from the given parameter handles on a fresh tape.
using ScalarFn = std::function<Var(Tape&, const std::vector<Var>&)>;

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

inline double evaluate(const ScalarFn& fn, const std::vector<Tensor>& inputs) {
  Tape tape;
  std::vector<Var> vars;
  for (const Tensor& t : inputs) vars.push_back(tape.constant(t));
  return tape.value(fn(tape, vars)).item();
}

// |analytic - numeric| / max(|analytic|, |numeric|, floor) over every
// element of every input.
inline GradCheck check_gradients(const ScalarFn& fn, const std::vector<Tensor>& inputs,
                                 double h = 1e-6, double floor = 1e-4) {
  Tape tape;
  std::vector<Var> vars;
  for (const Tensor& t : inputs) vars.push_back(tape.parameter(t));
  tape.backward(fn(tape, vars));
  GradCheck out;
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    const Tensor analytic = tape.grad(vars[p]);
    for (std::size_t i = 0; i < inputs[p].size(); ++i) {
      std::vector<Tensor> plus = inputs, minus = inputs;
      plus[p][i] += h;
      minus[p][i] -= h;
      const double numeric = (evaluate(fn, plus) - evaluate(fn, minus)) / (2.0 * h);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
      out.max_rel_error = std::max(out.max_rel_error, std::abs(analytic[i] - numeric) / denom);
      ++out.checked;
    }
  }
  return out;
}

}  // namespace oracle
