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

// Command-line front end: generate, run, score, report.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedbench/bench/dataset.hpp"
#include "fedbench/bench/experiment.hpp"
#include "fedbench/error.hpp"
#include "fedbench/metrics/metrics.hpp"
#include "fedbench/plantgen/plantgen.hpp"

namespace {

using namespace fedbench;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// Rows of numeric columns; a non-numeric first line is taken as a header.
std::vector<std::vector<double>> read_columns(const std::string& path, std::size_t columns) {
  std::istringstream in(slurp(path));
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ls, cell, ',')) {
      double v = 0.0;
      if (!parse_double(cell, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;
      throw DataError(path + ":" + std::to_string(line_no) + ": non-numeric cell");
    }
    if (row.size() != columns) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(columns) + " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::uint8_t to_label(double v, const std::string& path) {
  if (v != 0.0 && v != 1.0) throw DataError(path + ": labels must be 0 or 1");
  return v == 1.0 ? 1 : 0;
}

int cmd_generate(const std::string& out, std::size_t pairs, std::uint64_t seed,
                 std::size_t cycles_train, std::size_t cycles_test) {
  if (pairs < 1 || pairs > 10) throw ConfigError("--pairs must be in 1..10");
  plant::PlantConfig cfg;
  cfg.cycles_train = cycles_train;
  cfg.cycles_test = cycles_test;
  std::vector<int> ids;
  for (std::size_t i = 1; i <= pairs; ++i) ids.push_back(static_cast<int>(i));
  for (int id : ids) {
    bench::DataPair p{std::to_string(id), {}, {}};
    plant::DatasetPair g = plant::generate_pair(id, cfg, seed);
    p.train = std::move(g.train);
    p.test = std::move(g.test);
    bench::write_dataset_dir(out, {p});
    std::size_t pos = 0;
    for (auto l : p.test.labels) pos += l;
    std::printf("pair %d: train %zu, test %zu, labeled %zu (%.3f%%)\n", id, p.train.length(),
                p.test.length(), pos, 100.0 * static_cast<double>(pos) / p.test.length());
  }
  return 0;
}

int cmd_run(const std::string& config, const std::string& paradigm, const std::string& method,
            std::size_t seeds, const std::string& out) {
  bench::ExperimentConfig cfg = bench::load_config(config);
  if (!paradigm.empty()) bench::set_config_value(cfg, "paradigm", paradigm);
  if (!method.empty()) bench::set_config_value(cfg, "method", method);
  if (seeds > 0) {
    cfg.seeds.clear();
    for (std::size_t s = 1; s <= seeds; ++s) cfg.seeds.push_back(s);
  }
  if (!out.empty()) cfg.output_dir = out;
  const bench::ExperimentResult result =
      bench::run_experiment(cfg, [](const std::string& line) { std::cerr << line << "\n"; });
  int code = 0;
  for (const bench::RunSummary& s : result.summaries) {
    std::cout << "[" << fedsim::to_string(s.paradigm) << "]\n" << bench::format_summary_csv(s);
    for (const bench::SeedOutcome& o : s.seeds) {
      if (!o.error.empty() && code == 0) code = o.error_code;
    }
  }
  if (code) std::cerr << "warning: partial summary, see status.txt\n";
  return code;
}

int cmd_score(const std::string& scores_path, const std::string& labels_path, std::size_t lmax) {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  if (labels_path.empty()) {
    for (const auto& row : read_columns(scores_path, 2)) {
      scores.push_back(row[0]);
      labels.push_back(to_label(row[1], scores_path));
    }
  } else {
    for (const auto& row : read_columns(scores_path, 1)) scores.push_back(row[0]);
    for (const auto& row : read_columns(labels_path, 1)) labels.push_back(to_label(row[0], labels_path));
    if (scores.size() != labels.size()) {
      throw DataError("score count " + std::to_string(scores.size()) + " != label count " +
                      std::to_string(labels.size()));
    }
  }
  if (scores.empty()) throw DataError("no scores in " + scores_path);
  metrics::MetricsConfig mc;
  mc.lmax = lmax;
  std::cout << metrics::format_report(metrics::evaluate(scores, labels, mc));
  return 0;
}

int cmd_report(const std::string& in, const std::string& out) {
  const std::string csv = bench::ratio_report_from_dir(in);
  if (out.empty() || out == "-") {
    std::cout << csv;
    return 0;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw DataError("cannot write " + out);
  f << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fedbench: CL / FL / HFL anomaly detection benchmark"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Write synthetic QAPPD train/test pairs as CSV");
  std::string gen_out;
  std::size_t gen_pairs = 10, cycles_train = 200, cycles_test = 100;
  std::uint64_t gen_seed = 2024;
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--pairs", gen_pairs, "Number of dataset ids (1..10)");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--cycles-train", cycles_train, "Cycles per train series");
  gen->add_option("--cycles-test", cycles_test, "Cycles per test series");

  auto* run = app.add_subcommand("run", "Train and evaluate one or more paradigms");
  std::string config, paradigm, method, run_out;
  std::size_t seeds = 0;
  run->add_option("--config", config, "key = value config file")->required();
  run->add_option("--paradigm", paradigm, "cl, fl or hfl (comma list allowed)");
  run->add_option("--method", method, "usad, deepant or lstmae");
  run->add_option("--seeds", seeds, "Use seeds 1..N");
  run->add_option("--out", run_out, "Override output_dir");

  auto* score = app.add_subcommand("score", "Compute metrics for a score file");
  std::string scores_path, labels_path;
  std::size_t lmax = 10;
  score->add_option("--scores", scores_path, "score CSV (score,label if --labels is omitted)")
      ->required();
  score->add_option("--labels", labels_path, "label CSV, one 0/1 per line");
  score->add_option("--lmax", lmax, "VUS-PR maximum buffer");

  auto* report = app.add_subcommand("report", "Ratio table over finished runs");
  std::string report_in, report_out;
  report->add_option("--in", report_in, "Directory holding run outputs")->required();
  report->add_option("--out", report_out, "Output CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) return cmd_generate(gen_out, gen_pairs, gen_seed, cycles_train, cycles_test);
    if (*run) return cmd_run(config, paradigm, method, seeds, run_out);
    if (*score) return cmd_score(scores_path, labels_path, lmax);
    if (*report) return cmd_report(report_in, report_out);
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const PlanningError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const UndefinedMetric& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
