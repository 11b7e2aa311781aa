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

#include "fedbench/models/lstm_ae.hpp"

#include <algorithm>
#include <cmath>

#include "fedbench/autodiff/tape.hpp"
#include "fedbench/error.hpp"

namespace fedbench::models {

namespace {

constexpr std::size_t kGroups = 8;
constexpr std::size_t kScoreChunk = 512;

struct Graph {
  ad::LstmWeights encoder;
  ad::LstmWeights decoder;
  ad::Var out_w;
  ad::Var out_b;
  ad::Var all[kGroups];
};

Graph bind(ad::Tape& tape, const ad::ParamVector& p, bool trainable) {
  Graph g;
  for (std::size_t i = 0; i < kGroups; ++i) {
    g.all[i] = trainable ? tape.parameter(p.tensor(i)) : tape.constant(p.tensor(i));
  }
  g.encoder = {g.all[0], g.all[1], g.all[2]};
  g.decoder = {g.all[3], g.all[4], g.all[5]};
  g.out_w = g.all[6];
  g.out_b = g.all[7];
  return g;
}

ad::LstmState zero_state(ad::Tape& tape, std::size_t b, std::size_t z) {
  return {tape.constant(ad::Tensor({b, z})), tape.constant(ad::Tensor({b, z}))};
}

// Decoder outputs; element t reconstructs time step m-1-t.
std::vector<ad::Var> forward(ad::Tape& tape, const Graph& g, ad::Var x, std::size_t z) {
  const ad::Tensor& xv = tape.value(x);
  const std::size_t b = xv.extent(0), m = xv.extent(1);
  ad::LstmState state = zero_state(tape, b, z);
  for (std::size_t t = 0; t < m; ++t) {
    state = ad::lstm_step(tape, ad::time_slice(tape, x, t), state, g.encoder);
  }
  const ad::Var latent = state.h;
  std::vector<ad::Var> outputs;
  outputs.reserve(m);
  for (std::size_t t = 0; t < m; ++t) {
    state = ad::lstm_step(tape, latent, state, g.decoder);
    outputs.push_back(ad::dense(tape, state.h, g.out_w, g.out_b));
  }
  return outputs;
}

}  // namespace

LstmAe::LstmAe(ModelSpec spec) : Detector(spec) {
  spec.validate();
  const std::size_t d = spec.variables, z = spec.latent;
  set_layout({
      {{"encoder.Wx", {d, 4 * z}}, d, 4 * z},
      {{"encoder.Wh", {z, 4 * z}}, z, 4 * z},
      {{"encoder.b", {4 * z}}, 0, 0},
      {{"decoder.Wx", {z, 4 * z}}, z, 4 * z},
      {{"decoder.Wh", {z, 4 * z}}, z, 4 * z},
      {{"decoder.b", {4 * z}}, 0, 0},
      {{"output.W", {z, d}}, z, d},
      {{"output.b", {d}}, 0, 0},
  });
}

StepLosses LstmAe::train_step(ad::ParamVector& params, std::span<ad::SgdState> optimizers,
                              const WindowSet& batch, std::size_t /*epoch*/,
                              const ad::SgdConfig& cfg) const {
  check_batch(batch);
  check_params(params);
  if (optimizers.size() != 1) throw InvalidArgument("LSTM-AE needs one optimizer state");
  ad::Tape tape;
  const Graph g = bind(tape, params, true);
  const ad::Var x = tape.constant(batch.windows);
  const std::vector<ad::Var> outputs = forward(tape, g, x, spec().latent);
  const std::size_t m = outputs.size();
  ad::Var total;
  for (std::size_t t = 0; t < m; ++t) {
    const ad::Var step = ad::mse_loss(tape, outputs[t], ad::time_slice(tape, x, m - 1 - t));
    total = total.valid() ? ad::add(tape, total, step) : step;
  }
  const ad::Var loss = ad::scale(tape, total, 1.0 / static_cast<double>(m));
  const double value = tape.value(loss).item();
  if (!std::isfinite(value)) throw NumericError("LSTM-AE loss is not finite");
  tape.backward(loss);
  ad::ParamVector grads = ad::ParamVector::zeros(manifest());
  for (std::size_t i = 0; i < kGroups; ++i) {
    const ad::Tensor gi = tape.grad(g.all[i]);
    std::copy(gi.values().begin(), gi.values().end(), grads.group(i).begin());
  }
  ad::sgd_update(params, grads, cfg, optimizers[0]);
  return StepLosses{value, 0.0};
}

ad::Tensor LstmAe::reconstruct(const ad::ParamVector& params, const WindowSet& windows) const {
  check_batch(windows);
  check_params(params);
  const std::size_t m = spec().window, d = spec().variables;
  ad::Tensor out({windows.count(), m, d});
  for (std::size_t begin = 0; begin < windows.count(); begin += kScoreChunk) {
    const std::size_t end = std::min(windows.count(), begin + kScoreChunk);
    const WindowSet chunk = slice(windows, begin, end);
    ad::Tape tape;
    const Graph g = bind(tape, params, false);
    const std::vector<ad::Var> outputs =
        forward(tape, g, tape.constant(chunk.windows), spec().latent);
    for (std::size_t t = 0; t < m; ++t) {
      const ad::Tensor& yv = tape.value(outputs[t]);
      const std::size_t step = m - 1 - t;
      for (std::size_t i = 0; i < end - begin; ++i) {
        std::copy_n(yv.data() + i * d, d, out.data() + ((begin + i) * m + step) * d);
      }
    }
  }
  return out;
}

double LstmAe::loss(const ad::ParamVector& params, const WindowSet& batch, std::size_t) const {
  const ad::Tensor y = reconstruct(params, batch);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    acc += (y[i] - batch.windows[i]) * (y[i] - batch.windows[i]);
  }
  return acc / static_cast<double>(y.size());
}

std::vector<double> LstmAe::score(const ad::ParamVector& params, const WindowSet& windows) const {
  const ad::Tensor y = reconstruct(params, windows);
  const std::size_t per = spec().window * spec().variables;
  std::vector<double> out(windows.count(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = i * per; j < (i + 1) * per; ++j) {
      acc += (y[j] - windows.windows[j]) * (y[j] - windows.windows[j]);
    }
    out[i] = acc / static_cast<double>(per);
  }
  return out;
}

}  // namespace fedbench::models
