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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fedbench/autodiff/tensor.hpp"

namespace fedbench::ad {

struct ParamShape {
  std::string name;
  Shape shape;

  std::size_t size() const { return shape_size(shape); }
  friend bool operator==(const ParamShape&, const ParamShape&) = default;
};

using Manifest = std::vector<ParamShape>;

struct NamedTensor {
  std::string name;
  Tensor tensor;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

// Flat parameter array plus the ordered manifest describing how to cut it
// back into tensors. Manifest order is model construction order.
class ParamVector {
 public:
  ParamVector() = default;
  // Throws InvalidArgument ("manifest mismatch") when the value count does
  // not equal the manifest total.
  ParamVector(Manifest manifest, std::vector<double> values);
  static ParamVector zeros(Manifest manifest);

  const Manifest& manifest() const { return manifest_; }
  std::size_t size() const { return values_.size(); }
  std::size_t group_count() const { return manifest_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::size_t offset(std::size_t group) const { return offsets_.at(group); }
  std::span<double> group(std::size_t index);
  std::span<const double> group(std::size_t index) const;
  std::size_t index_of(const std::string& name) const;
  Tensor tensor(std::size_t index) const;

  bool same_manifest(const ParamVector& other) const {
    return manifest_ == other.manifest_;
  }

  friend bool operator==(const ParamVector& a, const ParamVector& b) {
    return a.manifest_ == b.manifest_ && a.values_ == b.values_;
  }

 private:
  Manifest manifest_;
  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
};

ParamVector flatten_params(std::span<const NamedTensor> tensors);
std::vector<NamedTensor> restore_params(const ParamVector& params);
// Variant that additionally checks the vector against an expected manifest.
std::vector<NamedTensor> restore_params(const ParamVector& params,
                                        const Manifest& expected);

// Little-endian checkpoint container:
//   "FBPV" | u32 version | u32 groups |
//   per group: u32 name_len, name bytes, u32 rank, u64 extents[rank] |
//   u64 value_count | f64 values[value_count]
inline constexpr std::uint32_t kCheckpointVersion = 1;
void write_checkpoint(std::ostream& out, const ParamVector& params);
ParamVector read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const ParamVector& params);
ParamVector load_checkpoint(const std::string& path);

}  // namespace fedbench::ad
