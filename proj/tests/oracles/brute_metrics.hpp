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

// Quadratic-time reference implementations of the ranking metrics. Each
// threshold is evaluated from scratch over all points.

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

namespace oracle {

struct BruteF1 {
  double f1 = 0.0;
  double threshold = 0.0;
};

inline BruteF1 brute_best_f1(const std::vector<double>& scores,
                             const std::vector<std::uint8_t>& labels) {
  const std::set<double> thresholds(scores.begin(), scores.end());
  BruteF1 best{-1.0, 0.0};
  // Ascending, strict improvement: keeps the lowest achieving threshold.
  for (double th : thresholds) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const bool pred = scores[i] >= th;
      if (pred && labels[i]) ++tp;
      if (pred && !labels[i]) ++fp;
      if (!pred && labels[i]) ++fn;
    }
    const double f1 = tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
    if (f1 > best.f1) best = {f1, th};
  }
  return best;
}

// Average precision with per-point gain (1 for hard labels, soft label for
// the buffered variant); recall is capped at 1 against `positives`.
inline double brute_weighted_ap(const std::vector<double>& scores, const std::vector<double>& gain,
                                double positives) {
  std::set<double, std::greater<>> thresholds(scores.begin(), scores.end());
  double ap = 0.0, prev_recall = 0.0;
  for (double th : thresholds) {
    double mass = 0.0, predicted = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= th) {
        mass += gain[i];
        predicted += 1.0;
      }
    }
    const double recall = std::min(1.0, mass / positives);
    ap += (recall - prev_recall) * (mass / predicted);
    prev_recall = recall;
  }
  return ap;
}

inline double brute_auc_pr(const std::vector<double>& scores,
                           const std::vector<std::uint8_t>& labels) {
  std::vector<double> gain(labels.begin(), labels.end());
  double positives = 0;
  for (auto l : labels) positives += l;
  return brute_weighted_ap(scores, gain, positives);
}

// Soft labels by direct distance to the nearest positive point.
inline std::vector<double> brute_soft_labels(const std::vector<std::uint8_t>& labels,
                                             std::size_t buffer) {
  std::vector<double> out(labels.size(), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (!labels[j]) continue;
      const std::size_t dist = i > j ? i - j : j - i;
      if (dist <= buffer) {
        out[i] = std::max(out[i], 1.0 - static_cast<double>(dist) / static_cast<double>(buffer + 1));
      }
    }
  }
  return out;
}

inline double brute_vus_pr(const std::vector<double>& scores,
                           const std::vector<std::uint8_t>& labels, std::size_t lmax) {
  double positives = 0;
  for (auto l : labels) positives += l;
  double acc = 0.0;
  for (std::size_t l = 0; l <= lmax; ++l) {
    acc += brute_weighted_ap(scores, brute_soft_labels(labels, l), positives);
  }
  return acc / static_cast<double>(lmax + 1);
}

}  // namespace oracle
