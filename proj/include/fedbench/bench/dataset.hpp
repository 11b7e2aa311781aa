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
#include <string>
#include <vector>

#include "fedbench/autodiff/tensor.hpp"
#include "fedbench/models/detector.hpp"
#include "fedbench/plantgen/plantgen.hpp"
#include "fedbench/series.hpp"

namespace fedbench::bench {

// Shortest decimal that round-trips the double.
std::string format_number(double v);

// Header row of variable names, then one row per timestep. With
// `with_labels` a trailing `label` column is written.
std::string series_to_csv(const LabeledSeries& s, bool with_labels);
void write_series_csv(const std::string& path, const LabeledSeries& s, bool with_labels);
// A trailing header column named `label` is read as labels ({0,1});
// otherwise labels are all zero. Errors are DataError naming file and line.
LabeledSeries parse_series_csv(const std::string& text, const std::string& source);
LabeledSeries read_series_csv(const std::string& path);

struct DataPair {
  std::string id;
  LabeledSeries train;
  LabeledSeries test;
};

// Pairs of `<id>_train.csv` / `<id>_test.csv`, ordered by id (numeric ids
// numerically). A test file without its train file, or the reverse, is an
// error.
std::vector<DataPair> load_dataset_dir(const std::string& dir);
void write_dataset_dir(const std::string& dir, const std::vector<DataPair>& pairs);

// QAPPD pairs for the listed dataset ids.
std::vector<DataPair> generate_qappd(const std::vector<int>& ids, const plant::PlantConfig& cfg,
                                     std::uint64_t seed);

struct MinMaxScaler {
  std::vector<double> lo;
  std::vector<double> range;  // 0 for constant variables

  static MinMaxScaler fit(const LabeledSeries& train);
  LabeledSeries apply(const LabeledSeries& s) const;
};

struct NormalizedPair {
  LabeledSeries train;
  LabeledSeries test;
  MinMaxScaler scaler;
};

// Per-variable min-max fit on train only, applied to both. Constant
// variables map to 0 and test values are not clipped.
NormalizedPair normalize(const LabeledSeries& train, const LabeledSeries& test);

// N = (T - m) / stride + 1 windows; with `forecasting` each window also
// gets the following sample as target and N = (T - m - 1) / stride + 1.
models::WindowSet make_windows(const LabeledSeries& s, std::size_t m, std::size_t stride,
                               bool forecasting);

}  // namespace fedbench::bench
