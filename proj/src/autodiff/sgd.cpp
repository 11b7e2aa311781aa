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

#include "fedbench/autodiff/sgd.hpp"

#include <cmath>

#include "fedbench/error.hpp"

namespace fedbench::ad {

void SgdConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("learning_rate must be a finite non-negative number");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw InvalidArgument("momentum must lie in [0, 1)");
  }
}

void sgd_update(ParamVector& params, const ParamVector& grads, const SgdConfig& cfg,
                SgdState& state) {
  if (!params.same_manifest(grads)) {
    throw InvalidArgument("sgd_step: manifest mismatch between parameters and gradients");
  }
  auto w = params.values();
  const auto g = grads.values();
  if (cfg.momentum == 0.0) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= cfg.learning_rate * g[i];
    return;
  }
  if (state.velocity.size() != w.size()) state.velocity.assign(w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    state.velocity[i] = cfg.momentum * state.velocity[i] + g[i];
    w[i] -= cfg.learning_rate * state.velocity[i];
  }
}

ParamVector sgd_step(const ParamVector& params, const ParamVector& grads,
                     const SgdConfig& cfg, SgdState& state) {
  ParamVector out = params;
  sgd_update(out, grads, cfg, state);
  return out;
}

}  // namespace fedbench::ad
