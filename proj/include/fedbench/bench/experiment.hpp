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
#include <string>
#include <vector>

#include "fedbench/bench/dataset.hpp"
#include "fedbench/fedsim/fedsim.hpp"
#include "fedbench/metrics/metrics.hpp"
#include "fedbench/models/detector.hpp"

namespace fedbench::bench {

struct ExperimentConfig {
  std::vector<fedsim::Paradigm> paradigms = {fedsim::Paradigm::kFedAvg};
  models::ModelSpec model;  // window/variables are filled from the data when run

  // Data: generated QAPPD ("qappd") or a CSV directory ("dir").
  std::string dataset = "qappd";
  std::string dataset_dir;
  std::vector<int> pairs = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t cycles_train = 200;
  std::size_t cycles_test = 100;
  std::uint64_t data_seed = 2024;
  double noise_fraction = 0.005;

  std::size_t train_stride = 4;

  ad::SgdConfig sgd;
  models::InitMode init = models::InitMode::kGlorot;
  std::size_t batch_size = 256;
  std::int64_t local_steps = fedsim::kLocalEpoch;
  std::size_t edge_rounds = 2;
  std::size_t edge_groups = 2;
  std::size_t rounds = 10;
  std::size_t workers = 1;

  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::size_t lmax = 10;
  std::string output_dir = "runs/out";

  void validate() const;
  // Name used in reports ("qappd", or the directory's base name).
  std::string dataset_label() const;
};

// Flat `key = value` lines; `#` starts a comment. Unknown keys and bad
// values throw ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
// Canonical text; parse_config(config_to_text(c)) reproduces c.
std::string config_to_text(const ExperimentConfig& cfg);

struct Stat {
  std::string metric;
  double mean = 0.0;
  double std = 0.0;  // sample (n-1); 0 for a single value
  std::size_t n = 0;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::optional<metrics::MetricReport> best;  // nullopt: no defined F1 or failed
  std::optional<std::size_t> best_round;
  std::string error;  // non-empty when the seed aborted
  int error_code = 0;
};

struct RunSummary {
  fedsim::Paradigm paradigm = fedsim::Paradigm::kFedAvg;
  std::vector<SeedOutcome> seeds;
  std::vector<Stat> stats;  // f1, f1c, auc_pr, vus_pr
  bool partial() const;
};

struct ExperimentResult {
  std::vector<RunSummary> summaries;
  bool partial() const;
};

// Sample mean and (n-1) standard deviation.
Stat summarize(const std::string& metric, const std::vector<double>& values);
std::string format_summary_csv(const RunSummary& summary);

// Prepared train and test windows shared by all seeds of a run.
struct Workload {
  std::vector<models::WindowSet> train;
  fedsim::EvalBundle eval;
  std::size_t variables = 0;
  double prevalence = 0.0;
};

std::vector<DataPair> load_pairs(const ExperimentConfig& cfg);
Workload build_workload(const ExperimentConfig& cfg, const std::vector<DataPair>& pairs,
                        bool forecasting);
fedsim::TopologySpec make_topology(const ExperimentConfig& cfg, fedsim::Paradigm paradigm,
                                   std::size_t clients);

// Writes under output_dir:
//   manifest.txt
//   <paradigm>/seed_<s>/rounds.csv, best_report.txt
//   <paradigm>/summary.csv, best_rounds.csv, status.txt
//   ratio_report.csv (several paradigms)
// `log` receives one progress line per round when set.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::function<void(const std::string&)>& log = {});

// Ratio table over every manifest.txt found below `dir`.
std::string ratio_report_from_dir(const std::string& dir);

}  // namespace fedbench::bench
