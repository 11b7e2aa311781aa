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

// Independent audit of generated plant data. Dwell phases are found from
// the output series alone, as maximal runs where |yawDot| stays below a
// small threshold, and classified by the yaw level they rest at.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "fedbench/series.hpp"

namespace oracle {

struct Dwell {
  std::size_t start = 0;
  std::size_t length = 0;  // samples
  double yaw_deg = 0.0;    // median yaw over the run
};

enum class DwellKind { kPause, kPick, kRelease, kOther };

struct AuditConfig {
  double still_rad_s = 0.02;  // |yawDot| below this counts as at rest
  std::size_t min_run = 3;    // shorter runs are ramp turning points
  double pause_deg_lo = 10.0, pause_deg_hi = 30.0;
  double pick_deg_hi = 10.0;
  double release_deg_lo = 60.0;
};

inline std::vector<Dwell> find_dwells(const fedbench::LabeledSeries& s, const AuditConfig& cfg = {}) {
  const std::size_t yaw = s.variable_index("yaw"), rate = s.variable_index("yawDot");
  std::vector<Dwell> out;
  std::size_t t = 0;
  while (t < s.length()) {
    if (std::abs(s.at(t, rate)) >= cfg.still_rad_s) {
      ++t;
      continue;
    }
    std::size_t end = t;
    while (end < s.length() && std::abs(s.at(end, rate)) < cfg.still_rad_s) ++end;
    if (end - t >= cfg.min_run) {
      std::vector<double> ys;
      for (std::size_t i = t; i < end; ++i) ys.push_back(s.at(i, yaw));
      std::nth_element(ys.begin(), ys.begin() + ys.size() / 2, ys.end());
      out.push_back({t, end - t, ys[ys.size() / 2] * 180.0 / std::numbers::pi});
    }
    t = end;
  }
  return out;
}

inline DwellKind classify(const Dwell& d, const AuditConfig& cfg = {}) {
  if (d.yaw_deg < cfg.pick_deg_hi) return DwellKind::kPick;
  if (d.yaw_deg >= cfg.pause_deg_lo && d.yaw_deg <= cfg.pause_deg_hi) return DwellKind::kPause;
  if (d.yaw_deg >= cfg.release_deg_lo) return DwellKind::kRelease;
  return DwellKind::kOther;
}

// Normalized autocorrelation of one channel at `lag` samples.
inline double autocorrelation(const std::vector<double>& x, std::size_t lag) {
  if (lag >= x.size()) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    den += (x[i] - mean) * (x[i] - mean);
    if (i + lag < x.size()) num += (x[i] - mean) * (x[i + lag] - mean);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace oracle
