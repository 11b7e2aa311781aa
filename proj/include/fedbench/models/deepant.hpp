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

// Convolutional next-point forecaster over the joint d-variable window:
// conv(k) -> relu -> maxpool(2) -> conv(k) -> relu -> maxpool(2) ->
// dense(z) -> relu -> dense(d). Score is the squared Euclidean error of the
// forecast.
class DeepAnt final : public Detector {
 public:
  explicit DeepAnt(ModelSpec spec);

  bool forecasting() const override { return true; }

  StepLosses train_step(ad::ParamVector& params, std::span<ad::SgdState> optimizers,
                        const WindowSet& batch, std::size_t epoch,
                        const ad::SgdConfig& cfg) const override;
  double loss(const ad::ParamVector& params, const WindowSet& batch,
              std::size_t epoch) const override;
  std::vector<double> score(const ad::ParamVector& params,
                            const WindowSet& windows) const override;

  // N x d forecasts.
  ad::Tensor predict(const ad::ParamVector& params, const WindowSet& windows) const;

  std::size_t pooled_length() const { return pooled2_; }

 private:
  std::size_t pooled2_;
};

}  // namespace fedbench::models
