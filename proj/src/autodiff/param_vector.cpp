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

#include "fedbench/autodiff/param_vector.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <utility>

#include "fedbench/error.hpp"

namespace fedbench::ad {

namespace {

std::vector<std::size_t> compute_offsets(const Manifest& manifest) {
  std::vector<std::size_t> offsets;
  offsets.reserve(manifest.size() + 1);
  std::size_t total = 0;
  for (const auto& entry : manifest) {
    offsets.push_back(total);
    total += entry.size();
  }
  offsets.push_back(total);
  return offsets;
}

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw DataError("checkpoint truncated");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

ParamVector::ParamVector(Manifest manifest, std::vector<double> values)
    : manifest_(std::move(manifest)),
      offsets_(compute_offsets(manifest_)),
      values_(std::move(values)) {
  if (values_.size() != offsets_.back()) {
    throw InvalidArgument("manifest mismatch: manifest describes " +
                          std::to_string(offsets_.back()) + " values, got " +
                          std::to_string(values_.size()));
  }
}

ParamVector ParamVector::zeros(Manifest manifest) {
  std::size_t total = 0;
  for (const auto& e : manifest) total += e.size();
  return ParamVector(std::move(manifest), std::vector<double>(total, 0.0));
}

std::span<double> ParamVector::group(std::size_t index) {
  return std::span<double>(values_).subspan(offsets_.at(index),
                                            manifest_.at(index).size());
}

std::span<const double> ParamVector::group(std::size_t index) const {
  return std::span<const double>(values_).subspan(offsets_.at(index),
                                                  manifest_.at(index).size());
}

std::size_t ParamVector::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < manifest_.size(); ++i) {
    if (manifest_[i].name == name) return i;
  }
  throw InvalidArgument("no parameter named '" + name + "'");
}

Tensor ParamVector::tensor(std::size_t index) const {
  const auto g = group(index);
  return Tensor(manifest_.at(index).shape, std::vector<double>(g.begin(), g.end()));
}

ParamVector flatten_params(std::span<const NamedTensor> tensors) {
  Manifest manifest;
  std::vector<double> values;
  for (const auto& t : tensors) {
    manifest.push_back({t.name, t.tensor.shape()});
    values.insert(values.end(), t.tensor.values().begin(), t.tensor.values().end());
  }
  return ParamVector(std::move(manifest), std::move(values));
}

std::vector<NamedTensor> restore_params(const ParamVector& params) {
  std::vector<NamedTensor> out;
  out.reserve(params.group_count());
  for (std::size_t i = 0; i < params.group_count(); ++i) {
    out.push_back({params.manifest()[i].name, params.tensor(i)});
  }
  return out;
}

std::vector<NamedTensor> restore_params(const ParamVector& params,
                                        const Manifest& expected) {
  if (params.manifest() != expected) {
    throw InvalidArgument("manifest mismatch on restore");
  }
  return restore_params(params);
}

void write_checkpoint(std::ostream& out, const ParamVector& params) {
  out.write("FBPV", 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.group_count()));
  for (const auto& entry : params.manifest()) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(entry.name.size()));
    out.write(entry.name.data(), static_cast<std::streamsize>(entry.name.size()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(entry.shape.size()));
    for (auto e : entry.shape) put_le<std::uint64_t>(out, e);
  }
  put_le<std::uint64_t>(out, params.size());
  for (double v : params.values()) put_le<double>(out, v);
}

ParamVector read_checkpoint(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "FBPV", 4) != 0) {
    throw DataError("not a parameter checkpoint (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto groups = get_le<std::uint32_t>(in);
  Manifest manifest;
  manifest.reserve(groups);
  for (std::uint32_t g = 0; g < groups; ++g) {
    const auto len = get_le<std::uint32_t>(in);
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw DataError("checkpoint truncated");
    const auto rank = get_le<std::uint32_t>(in);
    Shape shape(rank);
    for (auto& e : shape) e = static_cast<std::size_t>(get_le<std::uint64_t>(in));
    manifest.push_back({std::move(name), std::move(shape)});
  }
  const auto count = get_le<std::uint64_t>(in);
  std::vector<double> values(count);
  for (auto& v : values) v = get_le<double>(in);
  try {
    return ParamVector(std::move(manifest), std::move(values));
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("corrupt checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const ParamVector& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  write_checkpoint(out, params);
}

ParamVector load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read_checkpoint(in);
}

}  // namespace fedbench::ad
