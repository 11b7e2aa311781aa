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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fedbench {

// T x d sample matrix (row-major) with a binary label per timestep. The unit
// of dataset exchange between the generator, the CSV layer and training.
struct LabeledSeries {
  std::vector<std::string> variables;
  std::vector<double> samples;
  std::vector<std::uint8_t> labels;
  double rate_hz = 0.0;

  std::size_t width() const { return variables.size(); }
  std::size_t length() const { return labels.size(); }

  double at(std::size_t t, std::size_t v) const { return samples[t * width() + v]; }
  double& at(std::size_t t, std::size_t v) { return samples[t * width() + v]; }
  std::span<const double> row(std::size_t t) const {
    return std::span<const double>(samples).subspan(t * width(), width());
  }
  std::vector<double> column(std::size_t v) const;
  std::size_t variable_index(const std::string& name) const;

  // Throws InvalidArgument when samples/labels/variables disagree.
  void validate() const;

  friend bool operator==(const LabeledSeries&, const LabeledSeries&) = default;
};

inline std::vector<double> LabeledSeries::column(std::size_t v) const {
  std::vector<double> out(length());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = at(t, v);
  return out;
}

}  // namespace fedbench
