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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fedbench/autodiff/tape.hpp"
#include "fedbench/bench/dataset.hpp"
#include "fedbench/bench/experiment.hpp"
#include "fedbench/fedsim/fedsim.hpp"
#include "fedbench/metrics/metrics.hpp"
#include "fedbench/metrics/ratio.hpp"
#include "fedbench/models/deepant.hpp"
#include "fedbench/models/lstm_ae.hpp"
#include "fedbench/plantgen/plantgen.hpp"
#include "fedbench/rng.hpp"
#include "oracles/brute_metrics.hpp"
#include "oracles/finite_diff.hpp"
#include "oracles/fixtures.hpp"
#include "oracles/plant_audit.hpp"

namespace fs = std::filesystem;
using namespace fedbench;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
  void require(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1: gradients --------------------------------------------------------

ad::Tensor random_tensor(ad::Shape shape, Rng& rng) {
  ad::Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1.0, 1.0);
  return t;
}

std::size_t dim(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1)) % (hi - lo + 1);
}

struct GradCase {
  std::string name;
  oracle::ScalarFn fn;
  std::vector<ad::Tensor> inputs;
};

// One random case per call, cycling over the layer and loss families.
GradCase make_grad_case(std::size_t index, Rng& rng) {
  using namespace fedbench::ad;
  const std::size_t b = dim(rng, 1, 3), n = dim(rng, 1, 5), p = dim(rng, 1, 4);
  switch (index % 10) {
    case 0:
      return {"dense", [](Tape& t, const std::vector<Var>& v) { return sum(t, dense(t, v[0], v[1], v[2])); },
              {random_tensor({b, n}, rng), random_tensor({n, p}, rng), random_tensor({p}, rng)}};
    case 1: {
      const Tensor target = random_tensor({b, p}, rng);
      return {"dense+relu+mse",
              [target](Tape& t, const std::vector<Var>& v) {
                return mse_loss(t, relu(t, dense(t, v[0], v[1], v[2])), t.constant(target));
              },
              {random_tensor({b, n}, rng), random_tensor({n, p}, rng), random_tensor({p}, rng)}};
    }
    case 2: {
      const Tensor target = random_tensor({b, p}, rng);
      return {"dense+sigmoid+mse",
              [target](Tape& t, const std::vector<Var>& v) {
                return mse_loss(t, sigmoid(t, dense(t, v[0], v[1], v[2])), t.constant(target));
              },
              {random_tensor({b, n}, rng), random_tensor({n, p}, rng), random_tensor({p}, rng)}};
    }
    case 3:
      return {"tanh+scale+sum",
              [](Tape& t, const std::vector<Var>& v) { return sum(t, scale(t, tanh(t, v[0]), -1.7)); },
              {random_tensor({b, n}, rng)}};
    case 4:
      return {"add+sub",
              [](Tape& t, const std::vector<Var>& v) {
                return sum(t, tanh(t, sub(t, add(t, v[0], v[1]), scale(t, v[0], 0.3))));
              },
              {random_tensor({b, n}, rng), random_tensor({b, n}, rng)}};
    case 5: {
      const std::size_t k = dim(rng, 1, 3), m = k + dim(rng, 0, 4), d = dim(rng, 1, 3), c = dim(rng, 1, 3);
      const Tensor target = random_tensor({b, m - k + 1, c}, rng);
      return {"conv1d+mse",
              [target](Tape& t, const std::vector<Var>& v) {
                return mse_loss(t, conv1d(t, v[0], v[1], v[2]), t.constant(target));
              },
              {random_tensor({b, m, d}, rng), random_tensor({c, k, d}, rng), random_tensor({c}, rng)}};
    }
    case 6: {
      const std::size_t m = 2 * dim(rng, 1, 4), d = dim(rng, 1, 3);
      const Tensor target = random_tensor({b, m / 2, d}, rng);
      return {"maxpool+mse",
              [target](Tape& t, const std::vector<Var>& v) {
                return mse_loss(t, maxpool1d(t, v[0], 2), t.constant(target));
              },
              {random_tensor({b, m, d}, rng)}};
    }
    case 7: {
      const std::size_t m = dim(rng, 2, 5), d = dim(rng, 1, 3);
      return {"reshape+time_slice",
              [b, m, d](Tape& t, const std::vector<Var>& v) {
                const Var r = reshape(t, v[0], Shape{b, m * d});
                return add(t, sum(t, tanh(t, time_slice(t, v[0], m - 1))), sum(t, sigmoid(t, r)));
              },
              {random_tensor({b, m, d}, rng)}};
    }
    case 8: {
      const std::size_t z = dim(rng, 1, 3);
      const Tensor th = random_tensor({b, z}, rng), tc = random_tensor({b, z}, rng);
      return {"lstm_step",
              [th, tc](Tape& t, const std::vector<Var>& v) {
                const LstmState s = lstm_step(t, v[0], {v[1], v[2]}, {v[3], v[4], v[5]});
                return add(t, mse_loss(t, s.h, t.constant(th)), mse_loss(t, s.c, t.constant(tc)));
              },
              {random_tensor({b, n}, rng), random_tensor({b, z}, rng), random_tensor({b, z}, rng),
               random_tensor({n, 4 * z}, rng), random_tensor({z, 4 * z}, rng), random_tensor({4 * z}, rng)}};
    }
    default: {
      const std::size_t z = dim(rng, 1, 3), steps = dim(rng, 2, 3);
      const Tensor target = random_tensor({b, z}, rng);
      return {"lstm unroll",
              [z, b, steps, target](Tape& t, const std::vector<Var>& v) {
                LstmState s{t.constant(Tensor({b, z})), t.constant(Tensor({b, z}))};
                for (std::size_t i = 0; i < steps; ++i) {
                  s = lstm_step(t, time_slice(t, v[0], i), s, {v[1], v[2], v[3]});
                }
                return mse_loss(t, s.h, t.constant(target));
              },
              {random_tensor({b, steps, n}, rng), random_tensor({n, 4 * z}, rng),
               random_tensor({z, 4 * z}, rng), random_tensor({4 * z}, rng)}};
    }
  }
}

Outcome criterion_gradients() {
  Outcome o;
  Rng rng(20240101);
  double worst = 0.0;
  std::string worst_name;
  std::size_t checked = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < 100; ++i) {
    const GradCase c = make_grad_case(i, rng);
    const oracle::GradCheck r = oracle::check_gradients(c.fn, c.inputs, 1e-6);
    checked += r.checked;
    if (r.max_rel_error > worst) {
      worst = r.max_rel_error;
      worst_name = c.name;
    }
  }
  const double secs = seconds_since(t0);
  o.require(worst < 1e-4, "max relative error " + fmt("%.3g", worst) + " in " + worst_name);
  o.require(secs < 30.0, "took " + fmt("%.1f", secs) + " s");
  if (o.pass) {
    o.detail = "100 cases, " + std::to_string(checked) + " partials, max rel error " +
               fmt("%.2g", worst);
  }
  return o;
}

// ---- 2: aggregation ------------------------------------------------------

models::ModelSpec small_spec(models::ModelKind kind) {
  models::ModelSpec s;
  s.kind = kind;
  s.window = 12;
  s.variables = 2;
  s.latent = 4;
  s.kernel = 3;
  s.deepant_channels = 3;
  return s;
}

std::vector<models::WindowSet> sine_clients(bool forecasting, std::size_t n, std::size_t length) {
  std::vector<models::WindowSet> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = oracle::sine_series(length, 2, 16.0 + 3.0 * static_cast<double>(i),
                                       0.7 * static_cast<double>(i));
    out.push_back(bench::make_windows(s, 12, 2, forecasting));
  }
  return out;
}

Outcome criterion_aggregation() {
  Outcome o;
  // (a) fixed point on real model parameters.
  const models::LstmAe lstm(small_spec(models::ModelKind::kLstmAe));
  const ad::ParamVector p = lstm.init(3);
  const std::vector<ad::ParamVector> same{p, p, p, p};
  const std::vector<double> weights{3, 1, 7, 0.5};
  o.require(fedsim::fedavg_aggregate(same, weights) == p, "(a) FedAvg of identical params moved");

  // (b) HierFAVG with one group and kappa2 = 1 against FedAvg, round by round.
  const models::DeepAnt deepant(small_spec(models::ModelKind::kDeepAnt));
  const auto clients = sine_clients(true, 4, 100);
  fedsim::EvalBundle eval;
  auto test = oracle::sine_series(120, 2, 18.0);
  for (std::size_t t = 60; t < 66; ++t) {
    test.samples[t * 2] += 0.5;
    test.labels[t] = 1;
  }
  eval.windows.push_back(bench::make_windows(test, 12, 1, true));
  eval.labels.push_back(test.labels);
  fedsim::RunOptions opts;
  opts.sgd = {0.05, 0.5};
  opts.seed = 9;
  opts.eval = &eval;
  std::vector<fedsim::RoundLog> fl_rounds, hfl_rounds;
  fedsim::TopologySpec fl = fedsim::TopologySpec::star(4);
  fl.total_rounds = 5;
  fl.local_steps = 3;
  fl.batch_size = 8;
  fedsim::TopologySpec hfl = fedsim::TopologySpec::tree(4, 1);
  hfl.paradigm = fedsim::Paradigm::kHierarchical;
  hfl.total_rounds = 5;
  hfl.local_steps = 3;
  hfl.edge_rounds = 1;
  hfl.batch_size = 8;
  const fedsim::RunResult a = fedsim::fedavg_run(deepant, clients, fl, opts);
  const fedsim::RunResult b = fedsim::hierfavg_run(deepant, clients, hfl, opts);
  o.require(a.params == b.params, "(b) final parameters differ");
  for (std::size_t r = 0; r < a.rounds.size() && r < b.rounds.size(); ++r) {
    const auto& ra = *a.rounds[r].report;
    const auto& rb = *b.rounds[r].report;
    o.require(ra.f1_pointwise == rb.f1_pointwise && ra.auc_pr == rb.auc_pr &&
                  ra.vus_pr == rb.vus_pr && ra.f1_composite == rb.f1_composite,
              "(b) round " + std::to_string(r + 1) + " metrics differ");
    double la = 0.0, lb = 0.0;
    for (const auto& n : a.rounds[r].nodes) la += n.loss;
    for (const auto& n : b.rounds[r].nodes) lb += n.loss;
    o.require(la == lb, "(b) round " + std::to_string(r + 1) + " client losses differ");
  }
  o.require(a.rounds.size() == 5 && b.rounds.size() == 5, "(b) round count");

  // (c) equal-size clients, one full-batch step each, against one pooled
  // full-batch centralized step.
  double worst = 0.0;
  const auto linear = [&](const models::Detector& det, bool forecasting) {
    const auto sets = sine_clients(forecasting, 2, 60);
    std::vector<models::WindowSet> equal{sets[0], models::slice(sets[1], 0, sets[0].count())};
    fedsim::RunOptions lo;
    lo.sgd = {0.1, 0.0};
    lo.seed = 4;
    fedsim::TopologySpec t = fedsim::TopologySpec::star(2);
    t.total_rounds = 1;
    t.local_steps = 1;
    t.batch_size = 2 * equal[0].count();
    const fedsim::RunResult fed = fedsim::fedavg_run(det, equal, t, lo);
    const fedsim::RunResult cen = fedsim::centralized_train(det, equal, t, lo);
    for (std::size_t i = 0; i < fed.params.size(); ++i) {
      worst = std::max(worst, std::abs(fed.params.values()[i] - cen.params.values()[i]));
    }
  };
  linear(deepant, true);
  linear(lstm, false);
  o.require(worst <= 1e-9, "(c) max elementwise gap " + fmt("%.3g", worst));
  if (o.pass) o.detail = "fixed point exact, HFL==FL over 5 rounds, linearity gap " + fmt("%.2g", worst);
  return o;
}

// ---- 3: metrics ----------------------------------------------------------

Outcome criterion_metrics() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(77);
  double worst_f1 = 0.0, worst_ap = 0.0, worst_vus0 = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 31.0);
    std::vector<double> scores(n);
    std::vector<std::uint8_t> labels(n);
    const bool coarse = inst % 2 == 0;  // half the instances carry ties
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = coarse ? std::floor(rng.uniform() * 5.0) / 4.0 : rng.uniform();
      labels[i] = rng.uniform() < 0.3;
    }
    labels[static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)) % n] = 1;
    const auto f1 = metrics::best_f1_pointwise(scores, labels);
    const auto bf = oracle::brute_best_f1(scores, labels);
    worst_f1 = std::max({worst_f1, std::abs(f1.f1 - bf.f1), std::abs(f1.threshold - bf.threshold)});
    const double ap = metrics::auc_pr(scores, labels);
    worst_ap = std::max(worst_ap, std::abs(ap - oracle::brute_auc_pr(scores, labels)));
    worst_vus0 = std::max(worst_vus0, std::abs(metrics::vus_pr(scores, labels, 0) - ap));
  }
  o.require(worst_f1 <= 1e-12, "best F1 differs from brute force by " + fmt("%.3g", worst_f1));
  o.require(worst_ap <= 1e-12, "AUC-PR differs from brute force by " + fmt("%.3g", worst_ap));
  o.require(worst_vus0 <= 1e-12, "vus_pr(0) differs from auc_pr by " + fmt("%.3g", worst_vus0));

  // Composite F1 hand cases.
  const std::vector<std::uint8_t> l1{0, 1, 1, 0};
  const std::vector<double> s1{0, 1, 0, 0};
  o.require(metrics::composite_f1(s1, l1, 0.5) == 1.0, "composite [0,1,1,0]/[0,1,0,0] != 1");
  const std::vector<std::uint8_t> single{0, 1, 0, 0, 1, 0, 1};
  const std::vector<double> s2{0.1, 0.9, 0.8, 0.2, 0.3, 0.7, 0.95};
  const auto bf = metrics::best_f1_pointwise(s2, single);
  o.require(metrics::composite_f1(s2, single, bf.threshold) == bf.f1,
            "single-point events: composite != point-wise");
  o.require(metrics::composite_f1(s1, std::vector<std::uint8_t>{0, 1, 0, 0}, 0.5) == 1.0,
            "perfect predictions: composite != 1");
  o.require(metrics::composite_f1(s1, l1, 2.0) == 0.0, "no predictions: composite != 0");
  const double secs = seconds_since(t0);
  o.require(secs < 10.0, "took " + fmt("%.1f", secs) + " s");
  if (o.pass) o.detail = "200 brute-force instances and composite hand cases";
  return o;
}

// ---- 4: generator --------------------------------------------------------

Outcome criterion_generator() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const plant::PlantConfig noisy;  // desk scale: 200 train / 100 test cycles
  plant::PlantConfig clean = noisy;
  clean.noise_fraction = 0.0;
  const oracle::AuditConfig audit;
  double worst_pp = 0.0;
  for (int id = 1; id <= 10; ++id) {
    const plant::AnomalyPlan plan = plant::qappd_plan(id);
    const bench::DataPair pair = bench::generate_qappd({id}, noisy, 2024).at(0);
    const std::string tag = "pair " + std::to_string(id) + ": ";
    const auto events = metrics::find_events(pair.test.labels);
    o.require(events.size() == plan.event_count,
              tag + std::to_string(events.size()) + " events, expected " + std::to_string(plan.event_count));
    const double freq = static_cast<double>(std::count(pair.test.labels.begin(), pair.test.labels.end(), 1)) /
                        static_cast<double>(pair.test.length());
    const double pp = std::abs(freq - plan.target_frequency) * 100.0;
    worst_pp = std::max(worst_pp, pp);
    o.require(pp <= 0.2, tag + "label frequency off by " + fmt("%.3f", pp) + " pp");

    // Voltages of the normal series, as observed.
    for (std::size_t t = 0; t < pair.train.length(); ++t) {
      for (std::size_t v : {plant::kVoltage0, plant::kVoltage1}) {
        if (std::abs(pair.train.at(t, v)) > 18.0) {
          o.fail(tag + "train voltage " + fmt("%.3f", pair.train.at(t, v)) + " V");
          break;
        }
      }
    }
    // Pause lengths and pick angles by run-length detection on the
    // noise-free rendering of the same schedule.
    const bench::DataPair ref = bench::generate_qappd({id}, clean, 2024).at(0);
    std::size_t pauses = 0, picks = 0;
    for (const oracle::Dwell& d : oracle::find_dwells(ref.train, audit)) {
      const double secs = static_cast<double>(d.length) / clean.out_rate_hz;
      switch (oracle::classify(d, audit)) {
        case oracle::DwellKind::kPause:
          ++pauses;
          o.require(secs >= 0.3 - 0.04 && secs <= 0.7 + 0.04,
                    tag + "pause of " + fmt("%.3f", secs) + " s");
          break;
        case oracle::DwellKind::kPick:
          ++picks;
          o.require(d.yaw_deg >= 3.0 && d.yaw_deg <= 5.0, tag + "pick at " + fmt("%.3f", d.yaw_deg) + " deg");
          break;
        default:
          break;
      }
    }
    o.require(pauses == clean.cycles_train && picks == clean.cycles_train,
              tag + "audit found " + std::to_string(pauses) + " pauses, " + std::to_string(picks) + " picks");
  }
  const double secs = seconds_since(t0);
  o.require(secs < 120.0, "took " + fmt("%.1f", secs) + " s");
  if (o.pass) o.detail = "10 pairs, counts exact, worst frequency gap " + fmt("%.3f", worst_pp) + " pp";
  return o;
}

// ---- 5: detection --------------------------------------------------------

Outcome criterion_detection(const fs::path& work) {
  Outcome o;
  std::string detail;
  struct Want {
    const char* method;
    double ap_multiple;
    double min_f1;
  };
  const Want wants[] = {{"usad", 3.0, 0.3}, {"lstmae", 3.0, 0.3}, {"deepant", 2.0, 0.0}};
  for (const Want& w : wants) {
    const auto t0 = std::chrono::steady_clock::now();
    bench::ExperimentConfig cfg = bench::parse_config(
        std::string("paradigm = cl\nmethod = ") + w.method +
        "\npairs = 7\ncycles_train = 100\ncycles_test = 60\nwindow = 16\ntrain_stride = 4\n"
        "lr = 0.01\nmomentum = 0.9\nbatch_size = 64\nrounds = 50\nseeds = 1\n");
    cfg.output_dir = (work / "detect" / w.method).string();
    const auto pairs = bench::load_pairs(cfg);
    const double prevalence =
        bench::build_workload(cfg, pairs, cfg.model.kind == models::ModelKind::kDeepAnt).prevalence;
    const bench::ExperimentResult r = bench::run_experiment(cfg);
    const double secs = seconds_since(t0);
    const auto& seed = r.summaries.at(0).seeds.at(0);
    if (!seed.best) {
      o.fail(std::string(w.method) + ": no best report (" + seed.error + ")");
      continue;
    }
    const double ap = *seed.best->auc_pr, f1 = *seed.best->f1_pointwise;
    const std::string tag = std::string(w.method) + " auc_pr " + fmt("%.3f", ap) + " (prevalence " +
                            fmt("%.3f", prevalence) + "), f1 " + fmt("%.3f", f1) + ", " + fmt("%.0f", secs) + " s";
    o.require(ap >= w.ap_multiple * prevalence, tag);
    o.require(f1 >= w.min_f1, tag);
    o.require(secs < 600.0, tag);
    detail += (detail.empty() ? "" : "; ") + tag;
  }
  if (o.pass) o.detail = detail;
  return o;
}

// ---- 6: ratios -----------------------------------------------------------

Outcome criterion_ratios() {
  Outcome o;
  std::ifstream in(std::string(FEDBENCH_TEST_DATA) + "/reference_results.csv");
  if (!in) {
    o.fail("reference_results.csv not found");
    return o;
  }
  std::vector<metrics::MetricValue> values;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 6) {
      o.fail("bad reference row: " + line);
      return o;
    }
    values.push_back({f[0], f[1], f[2], f[3], std::stod(f[4])});
  }
  const auto rows = metrics::ratio_report(values);
  bool found = false;
  for (const auto& row : rows) {
    o.require(row.cl_ratio && *row.cl_ratio == 1.0,
              "cl/cl ratio not 1 for " + row.method + " " + row.dataset + " " + row.metric);
    if (row.method == "usad" && row.dataset == "qappd" && row.metric == "f1") {
      found = true;
      o.require(std::abs(*row.fl_ratio - 1.393) <= 1e-3, "usad qappd f1 fl/cl " + fmt("%.4f", *row.fl_ratio));
      o.require(std::abs(*row.hfl_ratio - 1.451) <= 1e-3, "usad qappd f1 hfl/cl " + fmt("%.4f", *row.hfl_ratio));
      if (o.pass) {
        o.detail = std::to_string(rows.size()) + " rows, usad qappd f1 fl/cl " + fmt("%.4f", *row.fl_ratio) +
                   ", hfl/cl " + fmt("%.4f", *row.hfl_ratio);
      }
    }
  }
  o.require(found, "usad qappd f1 row missing");
  o.require(rows.size() == 40, std::to_string(rows.size()) + " ratio rows, expected 40");
  return o;
}

// ---- 7: reproducibility --------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// rounds.csv minus its trailing wall_ms column.
std::string strip_wall_ms(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

std::map<std::string, double> read_report(const fs::path& p) {
  std::map<std::string, double> out;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq), v = line.substr(eq + 1);
    const bool metric = key == "f1" || key == "f1c" || key == "auc_pr" || key == "vus_pr";
    if (metric && v != "null") out[key] = std::stod(v);
  }
  return out;
}

Outcome criterion_reproducibility(const fs::path& work) {
  Outcome o;
  const fs::path dir = work / "repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "config.txt");
    cfg << "paradigm = cl,fl,hfl\nmethod = usad\npairs = 2,5\ncycles_train = 30\ncycles_test = 60\n"
           "window = 16\nlatent = 8\ntrain_stride = 4\nbatch_size = 64\nlr = 0.01\nmomentum = 0.9\n"
           "rounds = 3\nseeds = 1,2,3,4,5\n";
  }
  // Same config and output directory both times; the first result is moved
  // aside before the second run.
  const fs::path out = dir / "out";
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string(FEDBENCH_CLI) + " run --config " + (dir / "config.txt").string() +
                            " --out " + out.string() + " >/dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      o.fail(std::string("run ") + run + " exited non-zero");
      return o;
    }
    fs::rename(out, dir / run);
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir / "a");
    const fs::path other = dir / "b" / rel;
    if (!fs::exists(other)) {
      o.fail(rel.string() + " missing from the second run");
      continue;
    }
    std::string x = slurp(entry.path()), y = slurp(other);
    if (rel.filename() == "rounds.csv") {
      x = strip_wall_ms(x);
      y = strip_wall_ms(y);
    }
    o.require(x == y, rel.string() + " differs between runs");
    ++compared;
  }
  // Summary statistics recomputed from the per-seed best reports.
  for (const char* paradigm : {"cl", "fl", "hfl"}) {
    std::map<std::string, std::vector<double>> per_metric;
    for (int s = 1; s <= 5; ++s) {
      const auto rep = read_report(dir / "a" / paradigm / ("seed_" + std::to_string(s)) / "best_report.txt");
      for (const char* metric : {"f1", "f1c", "auc_pr", "vus_pr"}) {
        if (rep.count(metric)) per_metric[metric].push_back(rep.at(metric));
      }
    }
    std::istringstream in(slurp(dir / "a" / paradigm / "summary.csv"));
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      std::vector<std::string> f;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) f.push_back(cell);
      const auto& v = per_metric[f.at(0)];
      const std::string tag = std::string(paradigm) + " " + f[0];
      if (v.size() != 5) {
        o.fail(tag + ": " + std::to_string(v.size()) + " seed values");
        continue;
      }
      double mean = 0.0;
      for (double x : v) mean += x / 5.0;
      double ss2 = 0.0;
      for (double x : v) ss2 += (x - mean) * (x - mean);
      const double sd = std::sqrt(ss2 / 4.0);
      o.require(std::abs(std::stod(f[1]) - mean) <= 1e-12 * std::max(1.0, std::abs(mean)), tag + " mean");
      o.require(std::abs(std::stod(f[2]) - sd) <= 1e-12 * std::max(1.0, sd), tag + " std");
      ++rows;
    }
    o.require(rows == 4, std::string(paradigm) + " summary has " + std::to_string(rows) + " rows");
  }
  if (o.pass) o.detail = std::to_string(compared) + " artifacts identical, 5-seed mean and (n-1) std verified";
  return o;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "fedbench_acceptance";
  fs::create_directories(work);
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", criterion_gradients},
      {2, "aggregation equivalences", criterion_aggregation},
      {3, "metric oracles", criterion_metrics},
      {4, "generator fidelity", criterion_generator},
      {5, "detection sanity", [&] { return criterion_detection(work); }},
      {6, "ratio machinery", criterion_ratios},
      {7, "reproducibility", [&] { return criterion_reproducibility(work); }},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = seconds_since(t0);
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
