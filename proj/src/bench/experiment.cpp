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

#include "fedbench/bench/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fedbench/bench/dataset.hpp"
#include "fedbench/error.hpp"
#include "fedbench/metrics/ratio.hpp"

namespace fedbench::bench {

namespace fs = std::filesystem;

namespace {

const char* const kMetricNames[] = {"f1", "f1c", "auc_pr", "vus_pr"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_int(const std::string& key, const std::string& value) {
  T out{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size() ||
      !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return out;
}

std::vector<int> parse_pairs(const std::string& value) {
  if (value == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> out;
  for (const std::string& item : split_list(value)) {
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const int lo = parse_int<int>("pairs", item.substr(0, dash));
      const int hi = parse_int<int>("pairs", item.substr(dash + 1));
      if (hi < lo) throw ConfigError("pairs: empty range '" + item + "'");
      for (int i = lo; i <= hi; ++i) out.push_back(i);
    } else {
      out.push_back(parse_int<int>("pairs", item));
    }
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& items, const std::function<std::string(const T&)>& fmt,
                 const std::string& sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += fmt(items[i]);
  }
  return out;
}

std::string read_text(const std::string& path, bool config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (config) throw ConfigError("cannot open config " + path);
    throw DataError("cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

int error_code(const std::exception& e) {
  if (dynamic_cast<const NumericError*>(&e)) return 4;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const PlanningError*>(&e)) return 3;
  return 2;
}

std::optional<double> metric_of(const metrics::MetricReport& r, const std::string& name) {
  if (name == "f1") return r.f1_pointwise;
  if (name == "f1c") return r.f1_composite;
  if (name == "auc_pr") return r.auc_pr;
  return r.vus_pr;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (paradigms.empty()) throw ConfigError("paradigm: at least one paradigm required");
  std::set<fedsim::Paradigm> unique_paradigms(paradigms.begin(), paradigms.end());
  if (unique_paradigms.size() != paradigms.size()) throw ConfigError("paradigm: duplicate entry");
  if (dataset != "qappd" && dataset != "dir") {
    throw ConfigError("dataset: expected qappd or dir, got '" + dataset + "'");
  }
  if (dataset == "dir" && dataset_dir.empty()) throw ConfigError("dataset=dir needs dataset_dir");
  if (dataset == "qappd") {
    if (pairs.empty()) throw ConfigError("pairs: empty list");
    for (int id : pairs) {
      if (id < 1 || id > 10) throw ConfigError("pairs: QAPPD ids are 1..10, got " + std::to_string(id));
    }
    if (cycles_train == 0 || cycles_test == 0) throw ConfigError("cycles_train/cycles_test must be >= 1");
    if (noise_fraction < 0.0) throw ConfigError("noise_fraction must be >= 0");
  }
  if (model.window == 0) throw ConfigError("window must be >= 1");
  if (train_stride == 0) throw ConfigError("train_stride must be >= 1");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (local_steps != fedsim::kLocalEpoch && local_steps < 1) {
    throw ConfigError("local_steps must be >= 1 or 'epoch'");
  }
  if (edge_rounds == 0) throw ConfigError("edge_rounds must be >= 1");
  if (edge_groups == 0) throw ConfigError("edge_groups must be >= 1");
  if (seeds.empty()) throw ConfigError("seeds: at least one seed required");
  std::set<std::uint64_t> unique_seeds(seeds.begin(), seeds.end());
  if (unique_seeds.size() != seeds.size()) throw ConfigError("seeds must be distinct");
  if (output_dir.empty()) throw ConfigError("output_dir must be set");
  try {
    sgd.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

std::string ExperimentConfig::dataset_label() const {
  if (dataset == "dir") {
    fs::path p(dataset_dir);
    if (!p.has_filename()) p = p.parent_path();
    return p.filename().string();
  }
  if (pairs == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}) return "qappd";
  return "qappd-" + join<int>(pairs, [](const int& i) { return std::to_string(i); }, "+");
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "paradigm" || key == "paradigms") {
    c.paradigms.clear();
    for (const std::string& p : split_list(v)) c.paradigms.push_back(fedsim::parse_paradigm(p));
  } else if (key == "method") {
    try {
      c.model.kind = models::parse_model_kind(v);
    } catch (const Error& e) {
      throw ConfigError(std::string("method: ") + e.what());
    }
  } else if (key == "dataset") {
    c.dataset = v;
  } else if (key == "dataset_dir") {
    c.dataset_dir = v;
  } else if (key == "pairs") {
    c.pairs = parse_pairs(v);
  } else if (key == "cycles_train") {
    c.cycles_train = parse_int<std::size_t>(key, v);
  } else if (key == "cycles_test") {
    c.cycles_test = parse_int<std::size_t>(key, v);
  } else if (key == "data_seed") {
    c.data_seed = parse_int<std::uint64_t>(key, v);
  } else if (key == "noise_fraction") {
    c.noise_fraction = parse_double(key, v);
  } else if (key == "window") {
    c.model.window = parse_int<std::size_t>(key, v);
  } else if (key == "train_stride") {
    c.train_stride = parse_int<std::size_t>(key, v);
  } else if (key == "latent") {
    c.model.latent = parse_int<std::size_t>(key, v);
  } else if (key == "kernel") {
    c.model.kernel = parse_int<std::size_t>(key, v);
  } else if (key == "channels") {
    c.model.deepant_channels = parse_int<std::size_t>(key, v);
  } else if (key == "alpha") {
    c.model.usad_alpha = parse_double(key, v);
  } else if (key == "beta") {
    c.model.usad_beta = parse_double(key, v);
  } else if (key == "lr") {
    c.sgd.learning_rate = parse_double(key, v);
  } else if (key == "momentum") {
    c.sgd.momentum = parse_double(key, v);
  } else if (key == "init") {
    if (v == "glorot") {
      c.init = models::InitMode::kGlorot;
    } else if (v == "zeros") {
      c.init = models::InitMode::kZeros;
    } else {
      throw ConfigError("init: expected glorot or zeros, got '" + v + "'");
    }
  } else if (key == "batch_size") {
    c.batch_size = parse_int<std::size_t>(key, v);
  } else if (key == "local_steps") {
    c.local_steps = v == "epoch" ? fedsim::kLocalEpoch : parse_int<std::int64_t>(key, v);
  } else if (key == "edge_rounds") {
    c.edge_rounds = parse_int<std::size_t>(key, v);
  } else if (key == "edge_groups") {
    c.edge_groups = parse_int<std::size_t>(key, v);
  } else if (key == "rounds") {
    c.rounds = parse_int<std::size_t>(key, v);
  } else if (key == "workers") {
    c.workers = parse_int<std::size_t>(key, v);
  } else if (key == "seeds") {
    c.seeds.clear();
    for (const std::string& s : split_list(v)) c.seeds.push_back(parse_int<std::uint64_t>(key, s));
  } else if (key == "lmax") {
    c.lmax = parse_int<std::size_t>(key, v);
  } else if (key == "output_dir") {
    c.output_dir = v;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_text(path, true), path);
}

std::string config_to_text(const ExperimentConfig& c) {
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  kv("paradigm", join<fedsim::Paradigm>(c.paradigms, [](const fedsim::Paradigm& p) {
       return fedsim::to_string(p);
     }));
  kv("method", models::to_string(c.model.kind));
  kv("dataset", c.dataset);
  if (!c.dataset_dir.empty()) kv("dataset_dir", c.dataset_dir);
  kv("pairs", join<int>(c.pairs, [](const int& i) { return std::to_string(i); }));
  kv("cycles_train", std::to_string(c.cycles_train));
  kv("cycles_test", std::to_string(c.cycles_test));
  kv("data_seed", std::to_string(c.data_seed));
  kv("noise_fraction", format_number(c.noise_fraction));
  kv("window", std::to_string(c.model.window));
  kv("train_stride", std::to_string(c.train_stride));
  kv("latent", std::to_string(c.model.latent));
  kv("kernel", std::to_string(c.model.kernel));
  kv("channels", std::to_string(c.model.deepant_channels));
  kv("alpha", format_number(c.model.usad_alpha));
  kv("beta", format_number(c.model.usad_beta));
  kv("lr", format_number(c.sgd.learning_rate));
  kv("momentum", format_number(c.sgd.momentum));
  kv("init", c.init == models::InitMode::kZeros ? "zeros" : "glorot");
  kv("batch_size", std::to_string(c.batch_size));
  kv("local_steps", c.local_steps == fedsim::kLocalEpoch ? "epoch" : std::to_string(c.local_steps));
  kv("edge_rounds", std::to_string(c.edge_rounds));
  kv("edge_groups", std::to_string(c.edge_groups));
  kv("rounds", std::to_string(c.rounds));
  kv("workers", std::to_string(c.workers));
  kv("seeds", join<std::uint64_t>(c.seeds, [](const std::uint64_t& s) { return std::to_string(s); }));
  kv("lmax", std::to_string(c.lmax));
  kv("output_dir", c.output_dir);
  return out;
}

bool RunSummary::partial() const {
  return std::any_of(seeds.begin(), seeds.end(), [](const SeedOutcome& s) { return !s.error.empty(); });
}

bool ExperimentResult::partial() const {
  return std::any_of(summaries.begin(), summaries.end(), [](const RunSummary& s) { return s.partial(); });
}

Stat summarize(const std::string& metric, const std::vector<double>& values) {
  Stat s;
  s.metric = metric;
  s.n = values.size();
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::string format_summary_csv(const RunSummary& summary) {
  std::string out = "metric,mean,std\n";
  for (const Stat& s : summary.stats) {
    const bool defined = s.n > 0;
    out += s.metric + "," + metrics::format_value(defined ? std::optional(s.mean) : std::nullopt) +
           "," + metrics::format_value(defined ? std::optional(s.std) : std::nullopt) + "\n";
  }
  return out;
}

std::vector<DataPair> load_pairs(const ExperimentConfig& cfg) {
  if (cfg.dataset == "dir") return load_dataset_dir(cfg.dataset_dir);
  plant::PlantConfig plant_cfg;
  plant_cfg.cycles_train = cfg.cycles_train;
  plant_cfg.cycles_test = cfg.cycles_test;
  plant_cfg.noise_fraction = cfg.noise_fraction;
  return generate_qappd(cfg.pairs, plant_cfg, cfg.data_seed);
}

Workload build_workload(const ExperimentConfig& cfg, const std::vector<DataPair>& pairs,
                        bool forecasting) {
  if (pairs.empty()) throw DataError("no dataset pairs");
  Workload w;
  w.variables = pairs[0].train.width();
  w.eval.metrics.lmax = cfg.lmax;
  std::size_t positives = 0, points = 0;
  for (const DataPair& p : pairs) {
    if (p.train.variables != pairs[0].train.variables) {
      throw DataError("dataset " + p.id + ": variables differ from dataset " + pairs[0].id);
    }
    const NormalizedPair n = normalize(p.train, p.test);
    w.train.push_back(make_windows(n.train, cfg.model.window, cfg.train_stride, forecasting));
    w.eval.windows.push_back(make_windows(n.test, cfg.model.window, 1, forecasting));
    w.eval.labels.push_back(n.test.labels);
    positives += static_cast<std::size_t>(std::count(n.test.labels.begin(), n.test.labels.end(), 1));
    points += n.test.length();
  }
  w.prevalence = points ? static_cast<double>(positives) / static_cast<double>(points) : 0.0;
  return w;
}

fedsim::TopologySpec make_topology(const ExperimentConfig& cfg, fedsim::Paradigm paradigm,
                                   std::size_t clients) {
  fedsim::TopologySpec t = paradigm == fedsim::Paradigm::kHierarchical
                               ? fedsim::TopologySpec::tree(clients, std::min(cfg.edge_groups, clients))
                               : fedsim::TopologySpec::star(clients);
  t.paradigm = paradigm;
  t.batch_size = cfg.batch_size;
  t.total_rounds = cfg.rounds;
  t.workers = cfg.workers;
  switch (paradigm) {
    case fedsim::Paradigm::kCentral:
      t.local_steps = fedsim::kLocalEpoch;
      t.edge_rounds = 1;
      break;
    case fedsim::Paradigm::kFedAvg:
      t.local_steps = cfg.local_steps;
      t.edge_rounds = 1;
      break;
    case fedsim::Paradigm::kHierarchical:
      t.local_steps = cfg.local_steps;
      t.edge_rounds = cfg.edge_rounds;
      break;
  }
  return t;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::function<void(const std::string&)>& log) {
  cfg.validate();
  const std::vector<DataPair> pairs = load_pairs(cfg);
  ExperimentConfig resolved = cfg;
  resolved.model.variables = pairs.at(0).train.width();
  const std::unique_ptr<models::Detector> detector = models::make_detector(resolved.model);
  const Workload work = build_workload(resolved, pairs, detector->forecasting());

  const fs::path root(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw DataError("cannot create " + root.string() + ": " + ec.message());
  write_text(root / "manifest.txt", config_to_text(resolved));

  const std::string method = models::to_string(resolved.model.kind);
  const std::string dataset = resolved.dataset_label();
  ExperimentResult result;
  std::vector<metrics::MetricValue> ratio_inputs;
  for (fedsim::Paradigm paradigm : resolved.paradigms) {
    const std::string pname = fedsim::to_string(paradigm);
    const fedsim::TopologySpec topo = make_topology(resolved, paradigm, work.train.size());
    RunSummary summary;
    summary.paradigm = paradigm;
    for (std::uint64_t seed : resolved.seeds) {
      const fs::path dir = root / pname / ("seed_" + std::to_string(seed));
      fs::create_directories(dir, ec);
      if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
      SeedOutcome outcome;
      outcome.seed = seed;
      std::string rounds_csv = fedsim::round_csv_header();
      fedsim::RunOptions opts;
      opts.sgd = resolved.sgd;
      opts.seed = seed;
      opts.init = resolved.init;
      opts.eval = &work.eval;
      opts.on_round = [&](const fedsim::RoundLog& r) {
        rounds_csv += fedsim::round_csv_rows(r);
        if (log) {
          std::string line = pname + " seed " + std::to_string(seed) + " round " +
                             std::to_string(r.round);
          if (r.report) line += " f1=" + metrics::format_value(r.report->f1_pointwise);
          log(line);
        }
      };
      try {
        const fedsim::RunResult run = fedsim::run_paradigm(*detector, work.train, topo, opts);
        if (const fedsim::RoundLog* best = run.best_round()) {
          outcome.best = *best->report;
          outcome.best_round = best->round;
          outcome.best->provenance = {pname, dataset, method, seed, best->round};
        }
      } catch (const Error& e) {
        outcome.error = e.what();
        outcome.error_code = error_code(e);
        write_text(dir / "error.txt", outcome.error + "\n");
        if (log) log(pname + " seed " + std::to_string(seed) + " failed: " + outcome.error);
      }
      write_text(dir / "rounds.csv", rounds_csv);
      if (outcome.best) {
        write_text(dir / "best_report.txt", metrics::format_report(*outcome.best));
      }
      summary.seeds.push_back(std::move(outcome));
    }
    for (const char* name : kMetricNames) {
      std::vector<double> values;
      for (const SeedOutcome& s : summary.seeds) {
        if (!s.best) continue;
        if (const auto v = metric_of(*s.best, name)) values.push_back(*v);
      }
      summary.stats.push_back(summarize(name, values));
      if (!values.empty()) {
        ratio_inputs.push_back({pname, method, dataset, name, summary.stats.back().mean});
      }
    }
    const fs::path pdir = root / pname;
    write_text(pdir / "summary.csv", format_summary_csv(summary));
    std::string best_rounds = "seed,round\n";
    std::string status;
    std::size_t failed = 0;
    for (const SeedOutcome& s : summary.seeds) {
      best_rounds += std::to_string(s.seed) + "," +
                     (s.best_round ? std::to_string(*s.best_round) : std::string("null")) + "\n";
      if (!s.error.empty()) {
        ++failed;
        status += "seed " + std::to_string(s.seed) + ": " + s.error + "\n";
      }
    }
    write_text(pdir / "best_rounds.csv", best_rounds);
    status = (failed ? "partial: " + std::to_string(failed) + " of " +
                           std::to_string(summary.seeds.size()) + " seeds failed\n"
                     : std::string("complete\n")) +
             status;
    write_text(pdir / "status.txt", status);
    result.summaries.push_back(std::move(summary));
  }
  if (resolved.paradigms.size() > 1) {
    const std::vector<metrics::RatioRow> rows = metrics::ratio_report(ratio_inputs);
    write_text(root / "ratio_report.csv", metrics::format_ratio_csv(rows));
  }
  return result;
}

std::string ratio_report_from_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw DataError("report input not found: " + dir);
  std::vector<fs::path> manifests;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "manifest.txt") {
      manifests.push_back(entry.path());
    }
  }
  std::sort(manifests.begin(), manifests.end());
  if (manifests.empty()) throw DataError("no manifest.txt below " + dir);
  std::vector<metrics::MetricValue> values;
  for (const fs::path& m : manifests) {
    const ExperimentConfig c = parse_config(read_text(m.string(), true), m.string());
    for (const char* pname : {"cl", "fl", "hfl"}) {
      const fs::path summary = m.parent_path() / pname / "summary.csv";
      if (!fs::exists(summary)) continue;
      std::istringstream in(read_text(summary.string(), false));
      std::string line;
      std::getline(in, line);
      std::size_t line_no = 1;
      while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const std::vector<std::string> f = split_list(line);
        if (f.size() != 3) {
          throw DataError(summary.string() + ":" + std::to_string(line_no) + ": expected metric,mean,std");
        }
        if (f[1] == "null") continue;
        double v = 0.0;
        const auto res = std::from_chars(f[1].data(), f[1].data() + f[1].size(), v);
        if (res.ec != std::errc() || res.ptr != f[1].data() + f[1].size()) {
          throw DataError(summary.string() + ":" + std::to_string(line_no) + ": bad mean '" + f[1] + "'");
        }
        values.push_back({pname, models::to_string(c.model.kind), c.dataset_label(), f[0], v});
      }
    }
  }
  return metrics::format_ratio_csv(metrics::ratio_report(values));
}

}  // namespace fedbench::bench
