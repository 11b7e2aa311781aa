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

#include "fedbench/autodiff/tape.hpp"
#include "fedbench/models/detector.hpp"

namespace fedbench::models {

// Adversarially trained dual autoencoder over flattened m*d windows: a
// shared encoder E and decoders D1, D2, all dense. Hidden widths follow the
// md -> md/2 -> md/4 -> z funnel. Hidden layers use relu; decoder outputs go
// through tanh, which bounds the adversarial term.
//
// Epoch n (1-based) weights reconstruction by 1/n and the adversarial term
// w3 = D2(E(D1(E(W)))) by 1 - 1/n:
//   loss1 = 1/n |W - D1(E(W))|^2 + (1-1/n) |W - w3|^2   (updates E, D1)
//   loss2 = 1/n |W - D2(E(W))|^2 - (1-1/n) |W - w3|^2   (updates E, D2)
// Each phase is its own SGD step with its own optimizer state; the second
// phase sees the parameters produced by the first.
class Usad final : public Detector {
 public:
  explicit Usad(ModelSpec spec);

  std::size_t optimizer_count() const override { return 2; }

  StepLosses train_step(ad::ParamVector& params, std::span<ad::SgdState> optimizers,
                        const WindowSet& batch, std::size_t epoch,
                        const ad::SgdConfig& cfg) const override;
  double loss(const ad::ParamVector& params, const WindowSet& batch,
              std::size_t epoch) const override;
  // alpha * |W - D1(E(W))|^2 + beta * |W - D2(E(D1(E(W))))|^2, element mean.
  std::vector<double> score(const ad::ParamVector& params,
                            const WindowSet& windows) const override;

  // (loss1, loss2) at the given parameters, no update.
  StepLosses losses(const ad::ParamVector& params, const WindowSet& batch,
                    std::size_t epoch) const;

  std::size_t hidden1() const { return hidden1_; }
  std::size_t hidden2() const { return hidden2_; }

 private:
  enum Part { kEncoder = 0, kDecoder1 = 1, kDecoder2 = 2 };
  struct Layer {
    ad::Var weights, bias;
  };
  using Stack = std::vector<Layer>;
  struct Graph {
    Stack encoder, decoder1, decoder2;
  };

  Graph bind(ad::Tape& tape, const ad::ParamVector& params, int trainable_mask) const;
  ad::Var run(ad::Tape& tape, ad::Var x, const Stack& stack, bool encoder) const;
  double phase(ad::ParamVector& params, ad::SgdState& state, const WindowSet& batch,
               std::size_t epoch, const ad::SgdConfig& cfg, bool first) const;

  std::size_t flat_;
  std::size_t hidden1_;
  std::size_t hidden2_;
};

}  // namespace fedbench::models
