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

#include <vector>

#include "fedbench/autodiff/param_vector.hpp"

namespace fedbench::ad {

struct SgdConfig {
  double learning_rate = 0.01;
  double momentum = 0.0;  // in [0, 1)

  // learning_rate must be > 0 for training; lr == 0 is accepted as the
  // frozen-parameter degenerate case.
  void validate() const;
};

// Momentum buffer. Empty until the first step.
struct SgdState {
  std::vector<double> velocity;
};

// v <- momentum * v + g ; w <- w - lr * v
ParamVector sgd_step(const ParamVector& params, const ParamVector& grads,
                     const SgdConfig& cfg, SgdState& state);
// In-place variant used by the training loops.
void sgd_update(ParamVector& params, const ParamVector& grads, const SgdConfig& cfg,
                SgdState& state);

}  // namespace fedbench::ad
