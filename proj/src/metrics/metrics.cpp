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

#include "fedbench/metrics/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fedbench/error.hpp"

namespace fedbench::metrics {

namespace {

void check_inputs(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw InvalidArgument("scores and labels differ in length (" + std::to_string(scores.size()) +
                          " vs " + std::to_string(labels.size()) + ")");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw InvalidArgument("scores must be finite");
  }
}

std::size_t count_positive(std::span<const std::uint8_t> labels) {
  return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(),
                                                [](std::uint8_t l) { return l != 0; }));
}

std::size_t require_positives(std::span<const std::uint8_t> labels, const char* metric) {
  const std::size_t p = count_positive(labels);
  if (p == 0) throw UndefinedMetric(std::string(metric) + " is undefined without positive labels");
  return p;
}

// Indices ordered by descending score.
std::vector<std::size_t> descending_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

// Average precision with per-point true-positive mass `gain`, recall
// normalized by `positives` and capped at 1.
double weighted_ap(std::span<const double> scores, std::span<const double> gain,
                   const std::vector<std::size_t>& order, double positives) {
  double ap = 0.0, tp = 0.0, prev_recall = 0.0;
  std::size_t predicted = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      tp += gain[order[i]];
      ++predicted;
      ++i;
    }
    const double recall = std::min(1.0, tp / positives);
    const double precision = tp / static_cast<double>(predicted);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

}  // namespace

std::vector<Event> find_events(std::span<const std::uint8_t> labels) {
  std::vector<Event> events;
  for (std::size_t i = 0; i < labels.size();) {
    if (!labels[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < labels.size() && labels[j + 1]) ++j;
    events.push_back({i, j});
    i = j + 1;
  }
  return events;
}

F1Result best_f1_pointwise(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_inputs(scores, labels);
  const std::size_t positives = require_positives(labels, "point-wise F1");
  const auto order = descending_order(scores);
  F1Result best{-1.0, 0.0, 0.0, 0.0};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      (labels[order[i]] ? tp : fp) += 1;
      ++i;
    }
    const std::size_t fn = positives - tp;
    const double f1 = 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    if (f1 >= best.f1) {
      best.f1 = f1;
      best.threshold = threshold;
      best.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
      best.recall = static_cast<double>(tp) / static_cast<double>(positives);
    }
  }
  return best;
}

double composite_f1(std::span<const double> scores, std::span<const std::uint8_t> labels,
                    double threshold) {
  check_inputs(scores, labels);
  const auto events = find_events(labels);
  if (events.empty()) throw UndefinedMetric("composite F1 is undefined without events");
  std::size_t tp = 0, predicted = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= threshold) {
      ++predicted;
      if (labels[i]) ++tp;
    }
  }
  if (predicted == 0) return 0.0;
  std::size_t detected = 0;
  for (const Event& e : events) {
    for (std::size_t i = e.start; i <= e.end; ++i) {
      if (scores[i] >= threshold) {
        ++detected;
        break;
      }
    }
  }
  const double precision = static_cast<double>(tp) / static_cast<double>(predicted);
  const double recall = static_cast<double>(detected) / static_cast<double>(events.size());
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double auc_pr(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_inputs(scores, labels);
  const std::size_t positives = require_positives(labels, "AUC-PR");
  std::vector<double> gain(labels.begin(), labels.end());
  return weighted_ap(scores, gain, descending_order(scores), static_cast<double>(positives));
}

std::vector<double> soft_labels(std::span<const std::uint8_t> labels, std::size_t buffer) {
  std::vector<double> soft(labels.begin(), labels.end());
  if (buffer == 0) return soft;
  const double denom = static_cast<double>(buffer + 1);
  const std::size_t n = labels.size();
  for (const Event& e : find_events(labels)) {
    for (std::size_t dist = 1; dist <= buffer; ++dist) {
      const double w = 1.0 - static_cast<double>(dist) / denom;
      if (e.start >= dist) soft[e.start - dist] = std::max(soft[e.start - dist], w);
      if (e.end + dist < n) soft[e.end + dist] = std::max(soft[e.end + dist], w);
    }
  }
  return soft;
}

double buffered_average_precision(std::span<const double> scores,
                                  std::span<const std::uint8_t> labels, std::size_t buffer) {
  check_inputs(scores, labels);
  const std::size_t positives = require_positives(labels, "VUS-PR");
  return weighted_ap(scores, soft_labels(labels, buffer), descending_order(scores),
                     static_cast<double>(positives));
}

double vus_pr(std::span<const double> scores, std::span<const std::uint8_t> labels,
              std::size_t lmax) {
  check_inputs(scores, labels);
  const double positives = static_cast<double>(require_positives(labels, "VUS-PR"));
  const auto order = descending_order(scores);
  double total = 0.0;
  for (std::size_t l = 0; l <= lmax; ++l) {
    total += weighted_ap(scores, soft_labels(labels, l), order, positives);
  }
  return total / static_cast<double>(lmax + 1);
}

MetricReport evaluate(std::span<const double> scores, std::span<const std::uint8_t> labels,
                      const MetricsConfig& cfg) {
  check_inputs(scores, labels);
  MetricReport report;
  if (count_positive(labels) == 0) return report;
  const F1Result f1 = best_f1_pointwise(scores, labels);
  report.f1_pointwise = f1.f1;
  report.best_threshold = f1.threshold;
  report.precision = f1.precision;
  report.recall = f1.recall;
  report.f1_composite = composite_f1(scores, labels, f1.threshold);
  report.auc_pr = auc_pr(scores, labels);
  report.vus_pr = vus_pr(scores, labels, cfg.lmax);
  return report;
}

std::string format_value(std::optional<double> v) {
  if (!v) return "null";
  // Shortest form that parses back to the same double.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), *v);
  return std::string(buf, res.ptr);
}

std::string format_report(const MetricReport& r) {
  std::ostringstream os;
  os << "f1=" << format_value(r.f1_pointwise) << '\n'
     << "f1c=" << format_value(r.f1_composite) << '\n'
     << "auc_pr=" << format_value(r.auc_pr) << '\n'
     << "vus_pr=" << format_value(r.vus_pr) << '\n'
     << "threshold=" << format_value(r.best_threshold) << '\n'
     << "precision=" << format_value(r.precision) << '\n'
     << "recall=" << format_value(r.recall) << '\n';
  const Provenance& p = r.provenance;
  if (!p.paradigm.empty()) os << "paradigm=" << p.paradigm << '\n';
  if (!p.dataset.empty()) os << "dataset=" << p.dataset << '\n';
  if (!p.method.empty()) os << "method=" << p.method << '\n';
  if (!p.paradigm.empty()) {
    os << "seed=" << p.seed << '\n' << "round=" << p.round << '\n';
  }
  return os.str();
}

}  // namespace fedbench::metrics
