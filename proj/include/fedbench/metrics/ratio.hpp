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

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fedbench::metrics {

// One metric value of one (paradigm, method, dataset) cell.
struct MetricValue {
  std::string paradigm;  // "cl", "fl" or "hfl"
  std::string method;
  std::string dataset;
  std::string metric;
  double value = 0.0;
};

struct RatioRow {
  std::string method;
  std::string dataset;
  std::string metric;
  std::optional<double> cl, fl, hfl;
  // paradigm / CL; nullopt when either side is missing or CL is zero.
  std::optional<double> cl_ratio, fl_ratio, hfl_ratio;
  std::string note;  // empty, or why a ratio is missing
};

// Rows sorted by (method, dataset, metric). Throws InvalidArgument on an
// unknown paradigm or a duplicated cell.
std::vector<RatioRow> ratio_report(std::span<const MetricValue> values);

// CSV: method,dataset,metric,cl,fl,hfl,cl_over_cl,fl_over_cl,hfl_over_cl,note
std::string format_ratio_csv(std::span<const RatioRow> rows);

}  // namespace fedbench::metrics
