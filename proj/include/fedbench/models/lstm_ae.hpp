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

#include "fedbench/models/detector.hpp"

namespace fedbench::models {

// Sequence autoencoder with one LSTM layer of width z on each side. The
// decoder starts from the encoder's final state, is fed the latent code at
// every step and emits the window in reverse order. Score is the mean
// squared reconstruction error of the window.
class LstmAe final : public Detector {
 public:
  explicit LstmAe(ModelSpec spec);

  StepLosses train_step(ad::ParamVector& params, std::span<ad::SgdState> optimizers,
                        const WindowSet& batch, std::size_t epoch,
                        const ad::SgdConfig& cfg) const override;
  double loss(const ad::ParamVector& params, const WindowSet& batch,
              std::size_t epoch) const override;
  std::vector<double> score(const ad::ParamVector& params,
                            const WindowSet& windows) const override;

  // Reconstruction in natural time order, N x m x d.
  ad::Tensor reconstruct(const ad::ParamVector& params, const WindowSet& windows) const;
};

}  // namespace fedbench::models
