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

#include "fedbench/fedsim/fedsim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <thread>

#include "fedbench/error.hpp"

namespace fedbench::fedsim {

namespace {

constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kBatchStream = 0xba7c;

// Runs fn(0..n-1) on up to `workers` threads. The first failure by index
// is rethrown after all threads join.
void for_each_index(std::size_t n, std::size_t workers,
                    const std::function<void(std::size_t)>& fn) {
  workers = std::min(std::max<std::size_t>(workers, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string client_name(std::size_t i) { return "client" + std::to_string(i); }

class Clock {
 public:
  Clock() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void finish_round(RunResult& result, RoundLog log, const models::Detector& detector,
                  const RunOptions& opts, const Clock& clock) {
  if (opts.eval) log.report = central_evaluate(detector, result.params, *opts.eval);
  log.wall_ms = clock.ms();
  result.rounds.push_back(std::move(log));
  const RoundLog& last = result.rounds.back();
  if (last.report && last.report->f1_pointwise) {
    const double f1 = *last.report->f1_pointwise;
    const RoundLog* best = result.best_round();
    if (!best || f1 > *best->report->f1_pointwise) result.best = result.rounds.size() - 1;
  }
  if (opts.on_round) opts.on_round(result.rounds.back());
}

std::vector<NodeState> make_clients(const models::Detector& detector,
                                    std::span<const models::WindowSet> train,
                                    const TopologySpec& topo, const ad::ParamVector& init,
                                    std::uint64_t seed) {
  std::vector<NodeState> nodes;
  nodes.reserve(topo.clients.size());
  for (const ClientSpec& c : topo.clients) {
    nodes.emplace_back(train[c.data_index], init, detector.optimizer_count(),
                       derive_seed(seed, kBatchStream), c.stream);
  }
  return nodes;
}

ad::ParamVector aggregate_nodes(const std::vector<NodeState>& nodes,
                                std::span<const std::size_t> members) {
  std::vector<ad::ParamVector> params;
  std::vector<double> weights;
  for (std::size_t i : members) {
    params.push_back(nodes[i].params);
    weights.push_back(static_cast<double>(nodes[i].samples()));
  }
  return fedavg_aggregate(params, weights);
}

std::vector<NodeLoss> train_clients(std::vector<NodeState>& nodes,
                                    const models::Detector& detector, const TopologySpec& topo,
                                    const RunOptions& opts) {
  std::vector<LocalResult> results(nodes.size());
  for_each_index(nodes.size(), topo.workers, [&](std::size_t i) {
    results[i] = local_train(nodes[i], detector, topo.local_steps, topo.batch_size, opts.sgd);
  });
  std::vector<NodeLoss> losses;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    losses.push_back({client_name(i), results[i].mean_loss});
  }
  return losses;
}

void check_run(std::span<const models::WindowSet> train, const TopologySpec& topo) {
  topo.validate(train.size());
  for (const ClientSpec& c : topo.clients) {
    if (train[c.data_index].count() == 0) {
      throw ConfigError("train set " + std::to_string(c.data_index) + " has no windows");
    }
  }
}

}  // namespace

std::string to_string(Paradigm p) {
  switch (p) {
    case Paradigm::kCentral: return "cl";
    case Paradigm::kFedAvg: return "fl";
    case Paradigm::kHierarchical: return "hfl";
  }
  return "?";
}

Paradigm parse_paradigm(const std::string& name) {
  if (name == "cl") return Paradigm::kCentral;
  if (name == "fl") return Paradigm::kFedAvg;
  if (name == "hfl") return Paradigm::kHierarchical;
  throw ConfigError("unknown paradigm '" + name + "' (expected cl, fl or hfl)");
}

ad::ParamVector fedavg_aggregate(std::span<const ad::ParamVector> params,
                                 std::span<const double> weights) {
  if (params.empty()) throw InvalidArgument("fedavg_aggregate: no parameter vectors");
  if (params.size() != weights.size()) {
    throw InvalidArgument("fedavg_aggregate: " + std::to_string(params.size()) +
                          " vectors but " + std::to_string(weights.size()) + " weights");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("fedavg_aggregate: weights must be finite and non-negative");
    }
    total += w;
  }
  if (total <= 0.0) throw InvalidArgument("fedavg_aggregate: all weights are zero");
  for (std::size_t i = 1; i < params.size(); ++i) {
    if (!params[i].same_manifest(params[0])) {
      throw InvalidArgument("fedavg_aggregate: manifest mismatch between client 0 and client " +
                            std::to_string(i));
    }
  }
  ad::ParamVector out = params[0];
  std::span<double> acc = out.values();
  const std::span<const double> base = params[0].values();
  for (std::size_t i = 1; i < params.size(); ++i) {
    const double w = weights[i] / total;
    if (w == 0.0) continue;
    const std::span<const double> v = params[i].values();
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += w * (v[j] - base[j]);
  }
  return out;
}

void TopologySpec::validate(std::size_t train_sets) const {
  if (clients.empty()) throw ConfigError("topology has no clients");
  for (const ClientSpec& c : clients) {
    if (c.data_index >= train_sets) {
      throw ConfigError("client bound to train set " + std::to_string(c.data_index) +
                        " but only " + std::to_string(train_sets) + " exist");
    }
  }
  if (local_steps != kLocalEpoch && local_steps < 1) {
    throw ConfigError("local_steps must be >= 1 (or -1 for one epoch)");
  }
  if (edge_rounds < 1) throw ConfigError("edge_rounds must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (paradigm == Paradigm::kHierarchical) {
    if (edge_groups.empty()) throw ConfigError("hfl topology needs at least one edge group");
    std::vector<int> seen(clients.size(), 0);
    for (const auto& group : edge_groups) {
      if (group.empty()) throw ConfigError("empty edge group");
      for (std::size_t i : group) {
        if (i >= clients.size()) throw ConfigError("edge group names unknown client " + std::to_string(i));
        ++seen[i];
      }
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (seen[i] != 1) {
        throw ConfigError("edge groups must partition the clients; client " + std::to_string(i) +
                          " appears " + std::to_string(seen[i]) + " times");
      }
    }
  }
}

TopologySpec TopologySpec::star(std::size_t clients) {
  TopologySpec t;
  for (std::size_t i = 0; i < clients; ++i) t.clients.push_back({i, i});
  t.edge_groups = {std::vector<std::size_t>(clients)};
  std::iota(t.edge_groups[0].begin(), t.edge_groups[0].end(), 0);
  return t;
}

TopologySpec TopologySpec::tree(std::size_t clients, std::size_t groups) {
  if (groups < 1 || groups > clients) {
    throw ConfigError("cannot split " + std::to_string(clients) + " clients into " +
                      std::to_string(groups) + " edge groups");
  }
  TopologySpec t = star(clients);
  t.paradigm = Paradigm::kHierarchical;
  t.edge_groups.assign(groups, {});
  for (std::size_t i = 0; i < clients; ++i) t.edge_groups[i * groups / clients].push_back(i);
  return t;
}

NodeState::NodeState(const models::WindowSet& data, ad::ParamVector p, std::size_t optimizer_count,
                     std::uint64_t seed, std::uint64_t stream)
    : params(std::move(p)), optimizers(optimizer_count), data_(&data), rng_(seed, stream) {}

std::size_t NodeState::steps_per_epoch(std::size_t batch_size) const {
  return (samples() + batch_size - 1) / batch_size;
}

models::WindowSet NodeState::next_batch(std::size_t batch_size) {
  if (samples() == 0) throw ConfigError("node has no training windows");
  if (cursor_ == 0) {
    order_.resize(samples());
    std::iota(order_.begin(), order_.end(), 0);
    rng_.shuffle(order_);
  }
  const std::size_t end = std::min(samples(), cursor_ + batch_size);
  const std::span<const std::size_t> rows(order_.data() + cursor_, end - cursor_);
  models::WindowSet batch = models::gather(*data_, rows);
  cursor_ = end == samples() ? 0 : end;
  ++steps_done_;
  return batch;
}

LocalResult local_train(NodeState& node, const models::Detector& detector, std::int64_t steps,
                        std::size_t batch_size, const ad::SgdConfig& cfg) {
  if (node.samples() == 0) throw ConfigError("local_train: node has no training windows");
  if (batch_size == 0) throw ConfigError("local_train: batch_size must be positive");
  if (steps != kLocalEpoch && steps < 0) throw ConfigError("local_train: negative step count");
  const std::size_t per_epoch = node.steps_per_epoch(batch_size);
  const std::size_t count = steps == kLocalEpoch ? per_epoch : static_cast<std::size_t>(steps);
  node.optimizers.resize(detector.optimizer_count());
  LocalResult result;
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t epoch = 1 + node.steps_done() / per_epoch;
    const models::WindowSet batch = node.next_batch(batch_size);
    result.mean_loss += detector.train_step(node.params, node.optimizers, batch, epoch, cfg).loss;
  }
  result.steps = count;
  if (count > 0) result.mean_loss /= static_cast<double>(count);
  return result;
}

std::size_t EvalBundle::points() const {
  std::size_t n = 0;
  for (const auto& l : labels) n += l.size();
  return n;
}

PointScores central_scores(const models::Detector& detector, const ad::ParamVector& params,
                           const EvalBundle& bundle) {
  if (bundle.windows.empty()) throw InvalidArgument("central_evaluate: empty test bundle");
  if (bundle.windows.size() != bundle.labels.size()) {
    throw InvalidArgument("central_evaluate: windows and labels disagree on pair count");
  }
  PointScores out;
  out.scores.reserve(bundle.points());
  out.labels.reserve(bundle.points());
  for (std::size_t p = 0; p < bundle.windows.size(); ++p) {
    const std::vector<double> ws = detector.score(params, bundle.windows[p]);
    const models::ScoreSeries s =
        models::windows_to_point_scores(ws, detector.span(), bundle.labels[p].size());
    out.scores.insert(out.scores.end(), s.scores.begin(), s.scores.end());
    out.labels.insert(out.labels.end(), bundle.labels[p].begin(), bundle.labels[p].end());
  }
  return out;
}

metrics::MetricReport central_evaluate(const models::Detector& detector,
                                       const ad::ParamVector& params, const EvalBundle& bundle) {
  const PointScores ps = central_scores(detector, params, bundle);
  for (double s : ps.scores) {
    if (!std::isfinite(s)) throw NumericError("non-finite anomaly score during evaluation");
  }
  return metrics::evaluate(ps.scores, ps.labels, bundle.metrics);
}

ad::ParamVector initial_params(const models::Detector& detector, std::uint64_t seed,
                               models::InitMode init) {
  return detector.init(derive_seed(seed, kInitStream), init);
}

RunResult centralized_train(const models::Detector& detector,
                            std::span<const models::WindowSet> train, const TopologySpec& topo,
                            const RunOptions& opts) {
  check_run(train, topo);
  std::vector<models::WindowSet> parts;
  for (const ClientSpec& c : topo.clients) parts.push_back(train[c.data_index]);
  const models::WindowSet pooled = models::concat(parts);
  RunResult result;
  result.params = initial_params(detector, opts.seed, opts.init);
  NodeState node(pooled, result.params, detector.optimizer_count(),
                 derive_seed(opts.seed, kBatchStream), topo.clients[0].stream);
  for (std::size_t r = 1; r <= topo.total_rounds; ++r) {
    const Clock clock;
    RoundLog log;
    log.round = r;
    double loss = 0.0;
    for (std::size_t e = 0; e < topo.edge_rounds; ++e) {
      loss += local_train(node, detector, topo.local_steps, topo.batch_size, opts.sgd).mean_loss;
    }
    log.nodes.push_back({"central", loss / static_cast<double>(topo.edge_rounds)});
    result.params = node.params;
    finish_round(result, std::move(log), detector, opts, clock);
  }
  return result;
}

RunResult fedavg_run(const models::Detector& detector, std::span<const models::WindowSet> train,
                     const TopologySpec& topo, const RunOptions& opts) {
  check_run(train, topo);
  RunResult result;
  result.params = initial_params(detector, opts.seed, opts.init);
  std::vector<NodeState> nodes = make_clients(detector, train, topo, result.params, opts.seed);
  std::vector<std::size_t> all(nodes.size());
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t r = 1; r <= topo.total_rounds; ++r) {
    const Clock clock;
    RoundLog log;
    log.round = r;
    log.nodes = train_clients(nodes, detector, topo, opts);
    result.params = aggregate_nodes(nodes, all);
    for (NodeState& n : nodes) n.params = result.params;
    finish_round(result, std::move(log), detector, opts, clock);
  }
  return result;
}

RunResult hierfavg_run(const models::Detector& detector, std::span<const models::WindowSet> train,
                       const TopologySpec& topo, const RunOptions& opts) {
  TopologySpec checked = topo;
  checked.paradigm = Paradigm::kHierarchical;
  check_run(train, checked);
  RunResult result;
  result.params = initial_params(detector, opts.seed, opts.init);
  std::vector<NodeState> nodes = make_clients(detector, train, topo, result.params, opts.seed);
  const std::size_t groups = topo.edge_groups.size();
  std::vector<ad::ParamVector> edge_models(groups);
  std::vector<double> edge_weights(groups, 0.0);
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t i : topo.edge_groups[g]) {
      edge_weights[g] += static_cast<double>(nodes[i].samples());
    }
  }
  for (std::size_t r = 1; r <= topo.total_rounds; ++r) {
    const Clock clock;
    RoundLog log;
    log.round = r;
    std::vector<double> loss_sum(nodes.size(), 0.0);
    for (std::size_t e = 0; e < topo.edge_rounds; ++e) {
      const std::vector<NodeLoss> losses = train_clients(nodes, detector, topo, opts);
      for (std::size_t i = 0; i < nodes.size(); ++i) loss_sum[i] += losses[i].loss;
      for (std::size_t g = 0; g < groups; ++g) {
        edge_models[g] = aggregate_nodes(nodes, topo.edge_groups[g]);
        for (std::size_t i : topo.edge_groups[g]) nodes[i].params = edge_models[g];
      }
    }
    result.params = fedavg_aggregate(edge_models, edge_weights);
    for (NodeState& n : nodes) n.params = result.params;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      log.nodes.push_back({client_name(i), loss_sum[i] / static_cast<double>(topo.edge_rounds)});
    }
    finish_round(result, std::move(log), detector, opts, clock);
  }
  return result;
}

RunResult run_paradigm(const models::Detector& detector, std::span<const models::WindowSet> train,
                       const TopologySpec& topo, const RunOptions& opts) {
  switch (topo.paradigm) {
    case Paradigm::kCentral: return centralized_train(detector, train, topo, opts);
    case Paradigm::kFedAvg: return fedavg_run(detector, train, topo, opts);
    case Paradigm::kHierarchical: return hierfavg_run(detector, train, topo, opts);
  }
  throw ConfigError("unknown paradigm");
}

std::string round_csv_header() { return "round,node,loss,f1,f1c,auc_pr,vus_pr,wall_ms\n"; }

std::string round_csv_rows(const RoundLog& log) {
  std::string out;
  const std::string round = std::to_string(log.round);
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.3f", log.wall_ms);
  double mean_loss = 0.0;
  for (const NodeLoss& n : log.nodes) {
    out += round + "," + n.node + "," + metrics::format_value(n.loss) + ",,,,," + wall + "\n";
    mean_loss += n.loss;
  }
  if (!log.nodes.empty()) mean_loss /= static_cast<double>(log.nodes.size());
  out += round + ",global," + metrics::format_value(mean_loss) + ",";
  if (log.report) {
    const metrics::MetricReport& r = *log.report;
    out += metrics::format_value(r.f1_pointwise) + "," + metrics::format_value(r.f1_composite) +
           "," + metrics::format_value(r.auc_pr) + "," + metrics::format_value(r.vus_pr);
  } else {
    out += ",,,";
  }
  out += std::string(",") + wall + "\n";
  return out;
}

}  // namespace fedbench::fedsim
