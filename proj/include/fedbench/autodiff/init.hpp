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

#include <cmath>
#include <span>

#include "fedbench/rng.hpp"

namespace fedbench::ad {

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
inline void glorot_uniform(std::span<double> out, std::size_t fan_in, std::size_t fan_out,
                           Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : out) v = rng.uniform(-limit, limit);
}

}  // namespace fedbench::ad
