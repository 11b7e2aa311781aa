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

#include "fedbench/models/deepant.hpp"

#include <algorithm>
#include <cmath>

#include "fedbench/autodiff/tape.hpp"
#include "fedbench/error.hpp"

namespace fedbench::models {

namespace {

constexpr std::size_t kGroups = 8;
constexpr std::size_t kScoreChunk = 1024;

struct Graph {
  ad::Var params[kGroups];
};

Graph bind(ad::Tape& tape, const ad::ParamVector& p, bool trainable) {
  Graph g;
  for (std::size_t i = 0; i < kGroups; ++i) {
    g.params[i] = trainable ? tape.parameter(p.tensor(i)) : tape.constant(p.tensor(i));
  }
  return g;
}

ad::Var forward(ad::Tape& tape, const Graph& g, ad::Var x, std::size_t flat) {
  ad::Var h = ad::maxpool1d(tape, ad::relu(tape, ad::conv1d(tape, x, g.params[0], g.params[1])), 2);
  h = ad::maxpool1d(tape, ad::relu(tape, ad::conv1d(tape, h, g.params[2], g.params[3])), 2);
  const std::size_t b = tape.value(h).extent(0);
  h = ad::reshape(tape, h, {b, flat});
  h = ad::relu(tape, ad::dense(tape, h, g.params[4], g.params[5]));
  return ad::dense(tape, h, g.params[6], g.params[7]);
}

}  // namespace

DeepAnt::DeepAnt(ModelSpec spec) : Detector(spec) {
  spec.validate();
  const std::size_t m = spec.window, k = spec.kernel, d = spec.variables;
  const std::size_t c = spec.deepant_channels, z = spec.latent;
  const std::size_t conv1 = m - k + 1;
  const std::size_t pool1 = conv1 / 2;
  if (pool1 < k || (pool1 - k + 1) / 2 < 1) {
    throw InvalidArgument("DeepAnT: window m=" + std::to_string(m) + " too short for two conv(k=" +
                          std::to_string(k) + ")+maxpool(2) stages");
  }
  pooled2_ = (pool1 - k + 1) / 2;
  const std::size_t flat = pooled2_ * c;
  set_layout({
      {{"conv1.K", {c, k, d}}, k * d, k * c},
      {{"conv1.b", {c}}, 0, 0},
      {{"conv2.K", {c, k, c}}, k * c, k * c},
      {{"conv2.b", {c}}, 0, 0},
      {{"dense1.W", {flat, z}}, flat, z},
      {{"dense1.b", {z}}, 0, 0},
      {{"dense2.W", {z, d}}, z, d},
      {{"dense2.b", {d}}, 0, 0},
  });
}

StepLosses DeepAnt::train_step(ad::ParamVector& params, std::span<ad::SgdState> optimizers,
                               const WindowSet& batch, std::size_t /*epoch*/,
                               const ad::SgdConfig& cfg) const {
  check_batch(batch);
  check_params(params);
  if (optimizers.size() != 1) throw InvalidArgument("DeepAnT needs one optimizer state");
  ad::Tape tape;
  const Graph g = bind(tape, params, true);
  const ad::Var x = tape.constant(batch.windows);
  const ad::Var y = forward(tape, g, x, pooled2_ * spec().deepant_channels);
  const ad::Var loss = ad::mse_loss(tape, y, tape.constant(batch.next));
  const double value = tape.value(loss).item();
  if (!std::isfinite(value)) throw NumericError("DeepAnT loss is not finite");
  tape.backward(loss);
  ad::ParamVector grads = ad::ParamVector::zeros(manifest());
  for (std::size_t i = 0; i < kGroups; ++i) {
    const ad::Tensor gi = tape.grad(g.params[i]);
    std::copy(gi.values().begin(), gi.values().end(), grads.group(i).begin());
  }
  ad::sgd_update(params, grads, cfg, optimizers[0]);
  return StepLosses{value, 0.0};
}

ad::Tensor DeepAnt::predict(const ad::ParamVector& params, const WindowSet& windows) const {
  check_batch(windows);
  check_params(params);
  const std::size_t d = spec().variables;
  ad::Tensor out({windows.count(), d});
  for (std::size_t begin = 0; begin < windows.count(); begin += kScoreChunk) {
    const std::size_t end = std::min(windows.count(), begin + kScoreChunk);
    const WindowSet chunk = slice(windows, begin, end);
    ad::Tape tape;
    const Graph g = bind(tape, params, false);
    const ad::Var y = forward(tape, g, tape.constant(chunk.windows), pooled2_ * spec().deepant_channels);
    const ad::Tensor& yv = tape.value(y);
    std::copy(yv.values().begin(), yv.values().end(), out.data() + begin * d);
  }
  return out;
}

double DeepAnt::loss(const ad::ParamVector& params, const WindowSet& batch, std::size_t) const {
  const ad::Tensor y = predict(params, batch);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += (y[i] - batch.next[i]) * (y[i] - batch.next[i]);
  return acc / static_cast<double>(y.size());
}

std::vector<double> DeepAnt::score(const ad::ParamVector& params, const WindowSet& windows) const {
  const ad::Tensor y = predict(params, windows);
  const std::size_t d = spec().variables;
  std::vector<double> out(windows.count(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t v = 0; v < d; ++v) {
      const double e = y[i * d + v] - windows.next[i * d + v];
      out[i] += e * e;
    }
  }
  return out;
}

}  // namespace fedbench::models
