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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedbench/autodiff/param_vector.hpp"
#include "fedbench/autodiff/sgd.hpp"
#include "fedbench/metrics/metrics.hpp"
#include "fedbench/models/detector.hpp"
#include "fedbench/rng.hpp"

namespace fedbench::fedsim {

enum class Paradigm { kCentral, kFedAvg, kHierarchical };

// "cl", "fl", "hfl"
std::string to_string(Paradigm p);
Paradigm parse_paradigm(const std::string& name);

// Weighted element-wise mean, weights normalized to sum 1. Computed as an
// offset from the first vector, so identical inputs come back bit-exact.
ad::ParamVector fedavg_aggregate(std::span<const ad::ParamVector> params,
                                 std::span<const double> weights);

// local_steps value meaning "one pass over the node's data".
inline constexpr std::int64_t kLocalEpoch = -1;

struct ClientSpec {
  std::size_t data_index = 0;  // into the train set list
  std::uint64_t stream = 0;    // rng stream for batch order
};

struct TopologySpec {
  Paradigm paradigm = Paradigm::kFedAvg;
  std::vector<ClientSpec> clients;
  // HFL: partition of client indices. FL and CL ignore it.
  std::vector<std::vector<std::size_t>> edge_groups;
  std::int64_t local_steps = kLocalEpoch;  // kappa1
  std::size_t edge_rounds = 1;             // kappa2
  std::size_t total_rounds = 1;
  std::size_t batch_size = 256;
  std::size_t workers = 1;

  void validate(std::size_t train_sets) const;

  // One client per train set, stream = index.
  static TopologySpec star(std::size_t clients);
  // Clients dealt into `groups` contiguous, near-equal groups.
  static TopologySpec tree(std::size_t clients, std::size_t groups);
};

class NodeState {
 public:
  NodeState(const models::WindowSet& data, ad::ParamVector params, std::size_t optimizers,
            std::uint64_t seed, std::uint64_t stream);

  ad::ParamVector params;
  std::vector<ad::SgdState> optimizers;

  const models::WindowSet& data() const { return *data_; }
  std::size_t samples() const { return data_->count(); }
  std::size_t steps_done() const { return steps_done_; }
  std::size_t steps_per_epoch(std::size_t batch_size) const;

  // Next mini-batch of the running shuffled pass.
  models::WindowSet next_batch(std::size_t batch_size);

 private:
  const models::WindowSet* data_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::size_t steps_done_ = 0;

  friend struct LocalTrainer;
};

struct LocalResult {
  double mean_loss = 0.0;
  std::size_t steps = 0;
};

// `steps` SGD updates (kLocalEpoch: one pass) on the node's own data.
// Optimizer state stays with the node.
LocalResult local_train(NodeState& node, const models::Detector& detector, std::int64_t steps,
                        std::size_t batch_size, const ad::SgdConfig& cfg);

// Test pairs windowed at stride 1, with the per-point labels of each pair.
struct EvalBundle {
  std::vector<models::WindowSet> windows;
  std::vector<std::vector<std::uint8_t>> labels;
  metrics::MetricsConfig metrics;

  std::size_t points() const;
};

struct PointScores {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
};

// Window scores mapped back onto each test series and concatenated.
PointScores central_scores(const models::Detector& detector, const ad::ParamVector& params,
                           const EvalBundle& bundle);
metrics::MetricReport central_evaluate(const models::Detector& detector,
                                       const ad::ParamVector& params, const EvalBundle& bundle);

struct NodeLoss {
  std::string node;
  double loss = 0.0;
};

struct RoundLog {
  std::size_t round = 0;  // 1-based
  std::vector<NodeLoss> nodes;
  std::optional<metrics::MetricReport> report;
  double wall_ms = 0.0;
};

struct RunOptions {
  ad::SgdConfig sgd;
  std::uint64_t seed = 0;
  models::InitMode init = models::InitMode::kGlorot;
  const EvalBundle* eval = nullptr;  // no evaluation when null
  std::function<void(const RoundLog&)> on_round;
};

struct RunResult {
  ad::ParamVector params;
  std::vector<RoundLog> rounds;
  // Earliest round with the highest point-wise F1.
  std::optional<std::size_t> best;

  const RoundLog* best_round() const { return best ? &rounds[*best] : nullptr; }
};

// Initial global parameters for (seed, init mode).
ad::ParamVector initial_params(const models::Detector& detector, std::uint64_t seed,
                               models::InitMode init);

// Single trainer over the concatenated train sets of every client. Each
// round runs local_steps * edge_rounds steps (an epoch by default) with the
// rng stream of the first client.
RunResult centralized_train(const models::Detector& detector,
                            std::span<const models::WindowSet> train, const TopologySpec& topo,
                            const RunOptions& opts);
// Server round: every client runs local_steps, then sample-weighted FedAvg.
RunResult fedavg_run(const models::Detector& detector, std::span<const models::WindowSet> train,
                     const TopologySpec& topo, const RunOptions& opts);
// Cloud round: edge_rounds x (local_steps per client, edge FedAvg), then
// cloud FedAvg over the edge models weighted by group sample counts.
RunResult hierfavg_run(const models::Detector& detector, std::span<const models::WindowSet> train,
                       const TopologySpec& topo, const RunOptions& opts);
RunResult run_paradigm(const models::Detector& detector, std::span<const models::WindowSet> train,
                       const TopologySpec& topo, const RunOptions& opts);

// round,node,loss,f1,f1c,auc_pr,vus_pr,wall_ms
std::string round_csv_header();
// One row per node (metrics empty) and a "global" row carrying the report.
std::string round_csv_rows(const RoundLog& log);

}  // namespace fedbench::fedsim
