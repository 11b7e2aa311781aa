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

#include "fedbench/autodiff/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <utility>

#include "fedbench/error.hpp"

namespace fedbench::ad {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ')';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(values.begin(), values.end()) {
  if (values_.size() != shape_size(shape_)) {
    throw InvalidArgument("tensor of shape " + shape_to_string(shape_) +
                          " cannot hold " + std::to_string(values_.size()) +
                          " values");
  }
}

double Tensor::item() const {
  if (values_.size() != 1) {
    throw InvalidArgument("item() on tensor of shape " +
                          shape_to_string(shape_));
  }
  return values_[0];
}

bool Tensor::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != values_.size()) {
    throw InvalidArgument("cannot reshape " + shape_to_string(shape_) + " to " +
                          shape_to_string(shape));
  }
  Tensor out;
  out.shape_ = std::move(shape);
  out.values_ = values_;
  return out;
}

}  // namespace fedbench::ad
