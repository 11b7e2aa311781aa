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

#include "fedbench/series.hpp"

#include "fedbench/error.hpp"

namespace fedbench {

std::size_t LabeledSeries::variable_index(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i] == name) return i;
  }
  throw InvalidArgument("series has no variable '" + name + "'");
}

void LabeledSeries::validate() const {
  if (variables.empty()) throw InvalidArgument("series has no variables");
  if (samples.size() != labels.size() * variables.size()) {
    throw InvalidArgument("series holds " + std::to_string(samples.size()) +
                          " samples for " + std::to_string(labels.size()) + " rows x " +
                          std::to_string(variables.size()) + " variables");
  }
  for (auto l : labels) {
    if (l > 1) throw InvalidArgument("labels must be 0 or 1");
  }
}

}  // namespace fedbench
