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

#include "fedbench/models/detector.hpp"

#include <algorithm>
#include <cmath>

#include "fedbench/autodiff/init.hpp"
#include "fedbench/error.hpp"
#include "fedbench/models/deepant.hpp"
#include "fedbench/models/lstm_ae.hpp"
#include "fedbench/models/usad.hpp"
#include "fedbench/rng.hpp"

namespace fedbench::models {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kUsad: return "usad";
    case ModelKind::kDeepAnt: return "deepant";
    case ModelKind::kLstmAe: return "lstmae";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "usad") return ModelKind::kUsad;
  if (name == "deepant") return ModelKind::kDeepAnt;
  if (name == "lstmae" || name == "lstm-ae") return ModelKind::kLstmAe;
  throw InvalidArgument("unknown method '" + name + "' (expected usad, deepant or lstmae)");
}

void ModelSpec::validate() const {
  if (window < 2) throw InvalidArgument("window length m must be > 1");
  if (variables < 1) throw InvalidArgument("variable dimension d must be >= 1");
  if (latent < 1) throw InvalidArgument("latent dimension z must be >= 1");
  if (kind == ModelKind::kDeepAnt) {
    if (kernel < 1 || kernel >= window) throw InvalidArgument("kernel size k must satisfy 1 <= k < m");
    if (deepant_channels < 1) throw InvalidArgument("deepant_channels must be >= 1");
  }
  if (kind == ModelKind::kUsad) {
    if (usad_alpha < 0 || usad_beta < 0 || std::abs(usad_alpha + usad_beta - 1.0) > 1e-12) {
      throw InvalidArgument("usad_alpha and usad_beta must be non-negative and sum to 1");
    }
  }
}

WindowSet gather(const WindowSet& set, std::span<const std::size_t> rows) {
  const std::size_t m = set.length(), d = set.width(), block = m * d;
  WindowSet out;
  out.windows = ad::Tensor({rows.size(), m, d});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(set.windows.data() + rows[i] * block, block, out.windows.data() + i * block);
  }
  if (set.has_next()) {
    out.next = ad::Tensor({rows.size(), d});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::copy_n(set.next.data() + rows[i] * d, d, out.next.data() + i * d);
    }
  }
  return out;
}

WindowSet slice(const WindowSet& set, std::size_t begin, std::size_t end) {
  std::vector<std::size_t> rows;
  for (std::size_t i = begin; i < end; ++i) rows.push_back(i);
  return gather(set, rows);
}

WindowSet concat(std::span<const WindowSet> sets) {
  if (sets.empty()) throw InvalidArgument("concat: no window sets");
  const std::size_t m = sets[0].length(), d = sets[0].width();
  std::size_t total = 0;
  for (const auto& s : sets) {
    if (s.length() != m || s.width() != d || s.has_next() != sets[0].has_next()) {
      throw InvalidArgument("concat: window sets differ in shape");
    }
    total += s.count();
  }
  WindowSet out;
  std::vector<double> w, nx;
  w.reserve(total * m * d);
  for (const auto& s : sets) w.insert(w.end(), s.windows.values().begin(), s.windows.values().end());
  out.windows = ad::Tensor({total, m, d}, std::move(w));
  if (sets[0].has_next()) {
    for (const auto& s : sets) nx.insert(nx.end(), s.next.values().begin(), s.next.values().end());
    out.next = ad::Tensor({total, d}, std::move(nx));
  }
  return out;
}

void Detector::set_layout(std::vector<GroupInit> layout) {
  layout_ = std::move(layout);
  manifest_.clear();
  for (const auto& g : layout_) manifest_.push_back(g.shape);
}

ad::ParamVector Detector::init(std::uint64_t seed, InitMode mode) const {
  ad::ParamVector params = ad::ParamVector::zeros(manifest_);
  if (mode == InitMode::kZeros) return params;
  Rng rng(seed);
  for (std::size_t i = 0; i < layout_.size(); ++i) {
    if (layout_[i].fan_in == 0) continue;
    ad::glorot_uniform(params.group(i), layout_[i].fan_in, layout_[i].fan_out, rng);
  }
  return params;
}

void Detector::check_batch(const WindowSet& batch) const {
  if (batch.windows.rank() != 3 || batch.length() != spec_.window ||
      batch.width() != spec_.variables) {
    throw InvalidArgument("window batch of shape " + ad::shape_to_string(batch.windows.shape()) +
                          " does not match m=" + std::to_string(spec_.window) +
                          ", d=" + std::to_string(spec_.variables));
  }
  if (forecasting() && (batch.next.rank() != 2 || batch.next.extent(0) != batch.count() ||
                        batch.next.extent(1) != spec_.variables)) {
    throw InvalidArgument("forecasting model needs one next-point target per window");
  }
}

void Detector::check_params(const ad::ParamVector& params) const {
  if (params.manifest() != manifest_) {
    throw InvalidArgument("parameter manifest does not match the " + to_string(spec_.kind) +
                          " architecture");
  }
}

std::unique_ptr<Detector> make_detector(const ModelSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case ModelKind::kUsad: return std::make_unique<Usad>(spec);
    case ModelKind::kDeepAnt: return std::make_unique<DeepAnt>(spec);
    case ModelKind::kLstmAe: return std::make_unique<LstmAe>(spec);
  }
  throw InvalidArgument("unknown model kind");
}

EpochResult train_epoch(const Detector& detector, ad::ParamVector& params,
                        std::vector<ad::SgdState>& optimizers, const WindowSet& windows,
                        std::size_t batch_size, std::size_t epoch, const ad::SgdConfig& cfg) {
  if (batch_size == 0) throw InvalidArgument("batch_size must be positive");
  if (epoch < 1) throw InvalidArgument("epoch index must be >= 1");
  optimizers.resize(detector.optimizer_count());
  EpochResult result;
  for (std::size_t begin = 0; begin < windows.count(); begin += batch_size) {
    const WindowSet batch = slice(windows, begin, std::min(windows.count(), begin + batch_size));
    result.steps.push_back(detector.train_step(params, optimizers, batch, epoch, cfg));
  }
  for (const auto& s : result.steps) result.mean_loss += s.loss;
  if (!result.steps.empty()) result.mean_loss /= static_cast<double>(result.steps.size());
  return result;
}

ScoreSeries windows_to_point_scores(std::span<const double> window_scores, std::size_t m,
                                    std::size_t length) {
  if (m == 0 || length < m || window_scores.size() != length - m + 1) {
    throw InvalidArgument("expected " + std::to_string(length >= m && m > 0 ? length - m + 1 : 0) +
                          " window scores for length " + std::to_string(length) + " and m=" +
                          std::to_string(m) + ", got " + std::to_string(window_scores.size()));
  }
  ScoreSeries out;
  out.scores.assign(length, window_scores[0]);
  for (std::size_t i = 0; i < window_scores.size(); ++i) out.scores[i + m - 1] = window_scores[i];
  return out;
}

}  // namespace fedbench::models
