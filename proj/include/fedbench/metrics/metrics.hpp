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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fedbench::metrics {

// Maximal run of positive labels, inclusive bounds.
struct Event {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Event&, const Event&) = default;
};

std::vector<Event> find_events(std::span<const std::uint8_t> labels);

struct F1Result {
  double f1 = 0.0;
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// Sweep of every distinct score as threshold (predict positive when
// score >= threshold), no point adjustment. Ties resolve to the lowest
// threshold. Throws UndefinedMetric without positive labels.
F1Result best_f1_pointwise(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Harmonic mean of point-wise precision and event-wise recall at a fixed
// threshold; an event is recalled when any of its points is predicted.
// Zero predicted positives give 0.
double composite_f1(std::span<const double> scores, std::span<const std::uint8_t> labels,
                    double threshold);

// Average precision: sum over distinct thresholds (descending) of
// (recall step) * precision.
double auc_pr(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Soft labels for buffer l: 1 inside events, 1 - dist/(l+1) within l
// samples of an event, max under overlap.
std::vector<double> soft_labels(std::span<const std::uint8_t> labels, std::size_t buffer);

// Range-tolerant average precision for one buffer: true-positive mass is
// the soft label; recall = min(1, soft TP mass / hard positive count).
double buffered_average_precision(std::span<const double> scores,
                                  std::span<const std::uint8_t> labels, std::size_t buffer);

// Mean of buffered_average_precision over l = 0..lmax.
double vus_pr(std::span<const double> scores, std::span<const std::uint8_t> labels,
              std::size_t lmax);

struct Provenance {
  std::string paradigm;
  std::string dataset;
  std::string method;
  std::uint64_t seed = 0;
  std::size_t round = 0;
};

// Metric values are nullopt when undefined (no positive labels).
struct MetricReport {
  std::optional<double> f1_pointwise;
  std::optional<double> f1_composite;
  std::optional<double> auc_pr;
  std::optional<double> vus_pr;
  std::optional<double> best_threshold;
  std::optional<double> precision;
  std::optional<double> recall;
  Provenance provenance;
};

struct MetricsConfig {
  std::size_t lmax = 10;
};

MetricReport evaluate(std::span<const double> scores, std::span<const std::uint8_t> labels,
                      const MetricsConfig& cfg = {});

// key=value lines; undefined values print as "null".
std::string format_report(const MetricReport& report);
std::string format_value(std::optional<double> v);

}  // namespace fedbench::metrics
