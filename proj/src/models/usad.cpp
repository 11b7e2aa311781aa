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

#include "fedbench/models/usad.hpp"

#include <algorithm>
#include <cmath>

#include "fedbench/error.hpp"

namespace fedbench::models {

namespace {

// Layers per stack; each contributes a weights and a bias group.
constexpr std::size_t kLayers = 3;
constexpr std::size_t kGroupsPerPart = 2 * kLayers;
constexpr std::size_t kScoreChunk = 512;

}  // namespace

Usad::Usad(ModelSpec spec)
    : Detector(spec),
      flat_(spec.window * spec.variables),
      hidden1_(std::max<std::size_t>(1, flat_ / 2)),
      hidden2_(std::max<std::size_t>(1, flat_ / 4)) {
  spec.validate();
  const std::size_t z = spec.latent;
  std::vector<GroupInit> layout;
  auto add_stack = [&](const std::string& prefix, std::vector<std::size_t> widths) {
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      const std::string name = prefix + ".l" + std::to_string(l + 1);
      layout.push_back({{name + ".W", {widths[l], widths[l + 1]}}, widths[l], widths[l + 1]});
      layout.push_back({{name + ".b", {widths[l + 1]}}, 0, 0});
    }
  };
  add_stack("encoder", {flat_, hidden1_, hidden2_, z});
  add_stack("decoder1", {z, hidden2_, hidden1_, flat_});
  add_stack("decoder2", {z, hidden2_, hidden1_, flat_});
  set_layout(std::move(layout));
}

Usad::Graph Usad::bind(ad::Tape& tape, const ad::ParamVector& params, int trainable_mask) const {
  check_params(params);
  Graph g;
  Stack* stacks[3] = {&g.encoder, &g.decoder1, &g.decoder2};
  for (int part = 0; part < 3; ++part) {
    const bool trainable = (trainable_mask >> part) & 1;
    for (std::size_t l = 0; l < kLayers; ++l) {
      const std::size_t base = static_cast<std::size_t>(part) * kGroupsPerPart + 2 * l;
      auto bind_one = [&](std::size_t idx) {
        return trainable ? tape.parameter(params.tensor(idx)) : tape.constant(params.tensor(idx));
      };
      const ad::Var w = bind_one(base);
      const ad::Var b = bind_one(base + 1);
      stacks[part]->push_back({w, b});
    }
  }
  return g;
}

ad::Var Usad::run(ad::Tape& tape, ad::Var x, const Stack& stack, bool encoder) const {
  for (std::size_t l = 0; l < stack.size(); ++l) {
    x = ad::dense(tape, x, stack[l].weights, stack[l].bias);
    if (l + 1 < stack.size() || encoder) {
      x = ad::relu(tape, x);
    } else {
      x = ad::tanh(tape, x);
    }
  }
  return x;
}

double Usad::phase(ad::ParamVector& params, ad::SgdState& state, const WindowSet& batch,
                   std::size_t epoch, const ad::SgdConfig& cfg, bool first) const {
  const double inv = 1.0 / static_cast<double>(epoch);
  ad::Tape tape;
  const int mask = first ? (1 << kEncoder) | (1 << kDecoder1) : (1 << kEncoder) | (1 << kDecoder2);
  const Graph g = bind(tape, params, mask);
  const ad::Var w = tape.constant(batch.windows.reshaped({batch.count(), flat_}));
  const ad::Var z = run(tape, w, g.encoder, true);
  const ad::Var w1 = run(tape, z, g.decoder1, false);
  const ad::Var w3 = run(tape, run(tape, w1, g.encoder, true), g.decoder2, false);
  const ad::Var adversarial = ad::mse_loss(tape, w3, w);
  ad::Var loss;
  if (first) {
    loss = ad::add(tape, ad::scale(tape, ad::mse_loss(tape, w1, w), inv),
                   ad::scale(tape, adversarial, 1.0 - inv));
  } else {
    const ad::Var w2 = run(tape, z, g.decoder2, false);
    loss = ad::sub(tape, ad::scale(tape, ad::mse_loss(tape, w2, w), inv),
                   ad::scale(tape, adversarial, 1.0 - inv));
  }
  const double value = tape.value(loss).item();
  if (!std::isfinite(value)) throw NumericError("USAD loss is not finite");
  tape.backward(loss);

  ad::ParamVector grads = ad::ParamVector::zeros(manifest());
  const Stack* stacks[3] = {&g.encoder, &g.decoder1, &g.decoder2};
  for (int part = 0; part < 3; ++part) {
    if (!((mask >> part) & 1)) continue;
    for (std::size_t l = 0; l < kLayers; ++l) {
      const std::size_t base = static_cast<std::size_t>(part) * kGroupsPerPart + 2 * l;
      const ad::Tensor gw = tape.grad((*stacks[part])[l].weights);
      const ad::Tensor gb = tape.grad((*stacks[part])[l].bias);
      std::copy(gw.values().begin(), gw.values().end(), grads.group(base).begin());
      std::copy(gb.values().begin(), gb.values().end(), grads.group(base + 1).begin());
    }
  }
  ad::sgd_update(params, grads, cfg, state);
  return value;
}

StepLosses Usad::train_step(ad::ParamVector& params, std::span<ad::SgdState> optimizers,
                            const WindowSet& batch, std::size_t epoch,
                            const ad::SgdConfig& cfg) const {
  if (epoch < 1) throw InvalidArgument("USAD epoch index n must be >= 1");
  if (optimizers.size() != 2) throw InvalidArgument("USAD needs two optimizer states");
  check_batch(batch);
  StepLosses out;
  out.loss = phase(params, optimizers[0], batch, epoch, cfg, true);
  out.aux = phase(params, optimizers[1], batch, epoch, cfg, false);
  return out;
}

StepLosses Usad::losses(const ad::ParamVector& params, const WindowSet& batch,
                        std::size_t epoch) const {
  if (epoch < 1) throw InvalidArgument("USAD epoch index n must be >= 1");
  check_batch(batch);
  const double inv = 1.0 / static_cast<double>(epoch);
  ad::Tape tape;
  const Graph g = bind(tape, params, 0);
  const ad::Var w = tape.constant(batch.windows.reshaped({batch.count(), flat_}));
  const ad::Var z = run(tape, w, g.encoder, true);
  const ad::Var w1 = run(tape, z, g.decoder1, false);
  const ad::Var w2 = run(tape, z, g.decoder2, false);
  const ad::Var w3 = run(tape, run(tape, w1, g.encoder, true), g.decoder2, false);
  const double r1 = tape.value(ad::mse_loss(tape, w1, w)).item();
  const double r2 = tape.value(ad::mse_loss(tape, w2, w)).item();
  const double r3 = tape.value(ad::mse_loss(tape, w3, w)).item();
  return StepLosses{inv * r1 + (1.0 - inv) * r3, inv * r2 - (1.0 - inv) * r3};
}

double Usad::loss(const ad::ParamVector& params, const WindowSet& batch, std::size_t epoch) const {
  return losses(params, batch, epoch).loss;
}

std::vector<double> Usad::score(const ad::ParamVector& params, const WindowSet& windows) const {
  check_batch(windows);
  const double alpha = spec().usad_alpha, beta = spec().usad_beta;
  std::vector<double> out;
  out.reserve(windows.count());
  for (std::size_t begin = 0; begin < windows.count(); begin += kScoreChunk) {
    const std::size_t end = std::min(windows.count(), begin + kScoreChunk);
    const WindowSet chunk = slice(windows, begin, end);
    ad::Tape tape;
    const Graph g = bind(tape, params, 0);
    const ad::Var w = tape.constant(chunk.windows.reshaped({chunk.count(), flat_}));
    const ad::Var w1 = run(tape, run(tape, w, g.encoder, true), g.decoder1, false);
    const ad::Var w2 = run(tape, run(tape, w1, g.encoder, true), g.decoder2, false);
    const ad::Tensor& x = tape.value(w);
    const ad::Tensor& r1 = tape.value(w1);
    const ad::Tensor& r2 = tape.value(w2);
    for (std::size_t i = 0; i < chunk.count(); ++i) {
      double e1 = 0.0, e2 = 0.0;
      for (std::size_t j = i * flat_; j < (i + 1) * flat_; ++j) {
        e1 += (x[j] - r1[j]) * (x[j] - r1[j]);
        e2 += (x[j] - r2[j]) * (x[j] - r2[j]);
      }
      const double n = static_cast<double>(flat_);
      out.push_back(alpha * (e1 / n) + beta * (e2 / n));
    }
  }
  return out;
}

}  // namespace fedbench::models
