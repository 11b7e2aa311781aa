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

// Small deterministic series shared by the model and training tests.

#include <cmath>
#include <numbers>
#include <string>

#include "fedbench/bench/dataset.hpp"
#include "fedbench/series.hpp"

namespace oracle {

// d sines of period `period` samples with per-variable phase, in [0.1, 0.9].
inline fedbench::LabeledSeries sine_series(std::size_t length, std::size_t d = 2,
                                           double period = 20.0, double phase = 0.0) {
  fedbench::LabeledSeries s;
  for (std::size_t v = 0; v < d; ++v) s.variables.push_back("x" + std::to_string(v));
  s.rate_hz = 50.0;
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t v = 0; v < d; ++v) {
      const double arg = 2.0 * std::numbers::pi * static_cast<double>(t) / period +
                         phase + 1.3 * static_cast<double>(v);
      s.samples.push_back(0.5 + 0.4 * std::sin(arg));
    }
    s.labels.push_back(0);
  }
  return s;
}

inline fedbench::LabeledSeries constant_series(std::size_t length, std::size_t d, double value) {
  fedbench::LabeledSeries s = sine_series(length, d);
  for (double& x : s.samples) x = value;
  return s;
}

}  // namespace oracle
