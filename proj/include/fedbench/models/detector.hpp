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
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fedbench/autodiff/param_vector.hpp"
#include "fedbench/autodiff/sgd.hpp"
#include "fedbench/autodiff/tensor.hpp"

namespace fedbench::models {

enum class ModelKind { kUsad, kDeepAnt, kLstmAe };

std::string to_string(ModelKind kind);
// Accepts "usad", "deepant", "lstmae" (also "lstm-ae").
ModelKind parse_model_kind(const std::string& name);

struct ModelSpec {
  ModelKind kind = ModelKind::kUsad;
  std::size_t window = 64;     // m
  std::size_t variables = 10;  // d
  std::size_t latent = 16;     // z
  std::size_t kernel = 3;      // k, DeepAnT only
  std::size_t deepant_channels = 32;
  double usad_alpha = 0.5;
  double usad_beta = 0.5;

  void validate() const;
};

// N windows of m x d, plus the sample following each window for
// forecasting models (N x d, empty otherwise).
struct WindowSet {
  ad::Tensor windows;
  ad::Tensor next;

  std::size_t count() const { return windows.rank() == 3 ? windows.extent(0) : 0; }
  std::size_t length() const { return windows.extent(1); }
  std::size_t width() const { return windows.extent(2); }
  bool has_next() const { return next.size() > 0; }
};

WindowSet gather(const WindowSet& set, std::span<const std::size_t> rows);
WindowSet slice(const WindowSet& set, std::size_t begin, std::size_t end);
WindowSet concat(std::span<const WindowSet> sets);

enum class InitMode { kGlorot, kZeros };

struct StepLosses {
  double loss = 0.0;
  double aux = 0.0;  // USAD: second-phase loss
};

// A window-scoring anomaly detector. Instances are immutable; all state
// lives in the ParamVector and optimizer states the caller owns, so a
// detector may be shared between concurrently training nodes.
class Detector {
 public:
  explicit Detector(ModelSpec spec) : spec_(spec) {}
  virtual ~Detector() = default;

  const ModelSpec& spec() const { return spec_; }
  const ad::Manifest& manifest() const { return manifest_; }

  // Weights Glorot-uniform from `seed`, biases zero.
  ad::ParamVector init(std::uint64_t seed, InitMode mode = InitMode::kGlorot) const;

  virtual std::size_t optimizer_count() const { return 1; }
  virtual bool forecasting() const { return false; }
  // Time steps covered by one scored window (m, or m+1 with the target).
  std::size_t span() const { return spec_.window + (forecasting() ? 1 : 0); }

  // One SGD update on `batch`. `epoch` is 1-based.
  virtual StepLosses train_step(ad::ParamVector& params, std::span<ad::SgdState> optimizers,
                                const WindowSet& batch, std::size_t epoch,
                                const ad::SgdConfig& cfg) const = 0;

  // Mean objective on `batch` without updating.
  virtual double loss(const ad::ParamVector& params, const WindowSet& batch,
                      std::size_t epoch) const = 0;

  // One non-negative score per window.
  virtual std::vector<double> score(const ad::ParamVector& params,
                                    const WindowSet& windows) const = 0;

 protected:
  struct GroupInit {
    ad::ParamShape shape;
    std::size_t fan_in = 0;   // 0: zero-initialized (biases)
    std::size_t fan_out = 0;
  };
  void set_layout(std::vector<GroupInit> layout);
  void check_batch(const WindowSet& batch) const;
  void check_params(const ad::ParamVector& params) const;

 private:
  ModelSpec spec_;
  std::vector<GroupInit> layout_;
  ad::Manifest manifest_;
};

std::unique_ptr<Detector> make_detector(const ModelSpec& spec);

struct EpochResult {
  double mean_loss = 0.0;
  std::vector<StepLosses> steps;
};

// One pass over `windows` in order, in batches of `batch_size`.
EpochResult train_epoch(const Detector& detector, ad::ParamVector& params,
                        std::vector<ad::SgdState>& optimizers, const WindowSet& windows,
                        std::size_t batch_size, std::size_t epoch, const ad::SgdConfig& cfg);

// Scores aligned to a series of length T.
struct ScoreSeries {
  std::vector<double> scores;
  std::string alignment = "window-end";
};

// Stride-1 window i covers [i, i+m); its score lands on i+m-1. Positions
// before m-1 take the first window's score.
ScoreSeries windows_to_point_scores(std::span<const double> window_scores, std::size_t m,
                                    std::size_t length);

}  // namespace fedbench::models
