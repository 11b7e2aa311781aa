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

#include "fedbench/metrics/ratio.hpp"

#include <map>
#include <sstream>
#include <tuple>

#include "fedbench/error.hpp"
#include "fedbench/metrics/metrics.hpp"

namespace fedbench::metrics {

std::vector<RatioRow> ratio_report(std::span<const MetricValue> values) {
  using Key = std::tuple<std::string, std::string, std::string>;
  std::map<Key, RatioRow> rows;
  for (const auto& v : values) {
    RatioRow& row = rows[{v.method, v.dataset, v.metric}];
    row.method = v.method;
    row.dataset = v.dataset;
    row.metric = v.metric;
    std::optional<double>* slot = nullptr;
    if (v.paradigm == "cl") slot = &row.cl;
    else if (v.paradigm == "fl") slot = &row.fl;
    else if (v.paradigm == "hfl") slot = &row.hfl;
    else throw InvalidArgument("unknown paradigm '" + v.paradigm + "'");
    if (slot->has_value()) {
      throw InvalidArgument("duplicate value for " + v.paradigm + "/" + v.method + "/" +
                            v.dataset + "/" + v.metric);
    }
    *slot = v.value;
  }

  std::vector<RatioRow> out;
  out.reserve(rows.size());
  for (auto& [key, row] : rows) {
    std::vector<std::string> notes;
    if (!row.cl) {
      notes.emplace_back("missing cl");
    } else if (*row.cl == 0.0) {
      notes.emplace_back("cl is zero");
    } else {
      row.cl_ratio = *row.cl / *row.cl;
      if (row.fl) row.fl_ratio = *row.fl / *row.cl;
      if (row.hfl) row.hfl_ratio = *row.hfl / *row.cl;
    }
    if (!row.fl) notes.emplace_back("missing fl");
    if (!row.hfl) notes.emplace_back("missing hfl");
    for (std::size_t i = 0; i < notes.size(); ++i) {
      row.note += (i ? ";" : "") + notes[i];
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string format_ratio_csv(std::span<const RatioRow> rows) {
  std::ostringstream os;
  os << "method,dataset,metric,cl,fl,hfl,cl_over_cl,fl_over_cl,hfl_over_cl,note\n";
  for (const auto& r : rows) {
    os << r.method << ',' << r.dataset << ',' << r.metric << ',' << format_value(r.cl) << ','
       << format_value(r.fl) << ',' << format_value(r.hfl) << ',' << format_value(r.cl_ratio)
       << ',' << format_value(r.fl_ratio) << ',' << format_value(r.hfl_ratio) << ',' << r.note
       << '\n';
  }
  return os.str();
}

}  // namespace fedbench::metrics
