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

#include "fedbench/bench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fedbench/error.hpp"

namespace fedbench::bench {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Numeric ids sort numerically and before non-numeric ones.
bool id_less(const std::string& a, const std::string& b) {
  const bool na = !a.empty() && std::all_of(a.begin(), a.end(), ::isdigit);
  const bool nb = !b.empty() && std::all_of(b.begin(), b.end(), ::isdigit);
  if (na && nb) return a.size() != b.size() ? a.size() < b.size() : a < b;
  if (na != nb) return na;
  return a < b;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string series_to_csv(const LabeledSeries& s, bool with_labels) {
  s.validate();
  std::string out;
  for (std::size_t v = 0; v < s.width(); ++v) {
    if (v) out += ',';
    out += s.variables[v];
  }
  if (with_labels) out += ",label";
  out += '\n';
  for (std::size_t t = 0; t < s.length(); ++t) {
    for (std::size_t v = 0; v < s.width(); ++v) {
      if (v) out += ',';
      out += format_number(s.at(t, v));
    }
    if (with_labels) out += s.labels[t] ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

void write_series_csv(const std::string& path, const LabeledSeries& s, bool with_labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << series_to_csv(s, with_labels);
  if (!out) throw DataError("write failed for " + path);
}

LabeledSeries parse_series_csv(const std::string& text, const std::string& source) {
  LabeledSeries s;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool has_label = false;
  std::size_t fields_expected = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string_view line = trim(std::string_view(text).substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = split_fields(line);
    if (fields_expected == 0) {
      for (std::string_view f : fields) {
        const std::string_view name = trim(f);
        if (name.empty()) throw DataError(source + ":" + std::to_string(line_no) + ": empty column name");
        s.variables.emplace_back(name);
      }
      has_label = s.variables.back() == "label";
      if (has_label) s.variables.pop_back();
      if (s.variables.empty()) throw DataError(source + ":1: no variable columns");
      fields_expected = fields.size();
      continue;
    }
    if (fields.size() != fields_expected) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(fields_expected) + " fields, got " +
                      std::to_string(fields.size()));
    }
    for (std::size_t v = 0; v < s.variables.size(); ++v) {
      const std::string_view f = trim(fields[v]);
      double value = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), value);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw DataError(source + ":" + std::to_string(line_no) + ": column " +
                        s.variables[v] + ": not a number: '" + std::string(f) + "'");
      }
      s.samples.push_back(value);
    }
    if (has_label) {
      const std::string_view f = trim(fields.back());
      if (f != "0" && f != "1") {
        throw DataError(source + ":" + std::to_string(line_no) + ": label must be 0 or 1, got '" +
                        std::string(f) + "'");
      }
      s.labels.push_back(f == "1" ? 1 : 0);
    } else {
      s.labels.push_back(0);
    }
  }
  if (fields_expected == 0) throw DataError(source + ": missing header row");
  return s;
}

LabeledSeries read_series_csv(const std::string& path) {
  return parse_series_csv(read_file(path), path);
}

std::vector<DataPair> load_dataset_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw DataError("dataset directory not found: " + dir);
  std::map<std::string, std::pair<std::string, std::string>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    auto ends_with = [&](const std::string& suffix) {
      return name.size() > suffix.size() &&
             name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with("_train.csv")) {
      files[name.substr(0, name.size() - 10)].first = entry.path().string();
    } else if (ends_with("_test.csv")) {
      files[name.substr(0, name.size() - 9)].second = entry.path().string();
    }
  }
  std::vector<std::string> ids;
  for (const auto& [id, paths] : files) {
    if (paths.first.empty()) throw DataError("dataset " + id + ": missing " + id + "_train.csv");
    if (paths.second.empty()) throw DataError("dataset " + id + ": missing " + id + "_test.csv");
    ids.push_back(id);
  }
  if (ids.empty()) throw DataError("no <id>_train.csv / <id>_test.csv pairs in " + dir);
  std::sort(ids.begin(), ids.end(), id_less);
  std::vector<DataPair> pairs;
  for (const std::string& id : ids) {
    DataPair p{id, read_series_csv(files[id].first), read_series_csv(files[id].second)};
    if (p.train.variables != p.test.variables) {
      throw DataError("dataset " + id + ": train and test headers differ");
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void write_dataset_dir(const std::string& dir, const std::vector<DataPair>& pairs) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir + ": " + ec.message());
  for (const DataPair& p : pairs) {
    write_series_csv((fs::path(dir) / (p.id + "_train.csv")).string(), p.train, false);
    write_series_csv((fs::path(dir) / (p.id + "_test.csv")).string(), p.test, true);
  }
}

std::vector<DataPair> generate_qappd(const std::vector<int>& ids, const plant::PlantConfig& cfg,
                                     std::uint64_t seed) {
  std::vector<DataPair> out;
  for (int id : ids) {
    plant::DatasetPair p = plant::generate_pair(id, cfg, seed);
    out.push_back({std::to_string(id), std::move(p.train), std::move(p.test)});
  }
  return out;
}

MinMaxScaler MinMaxScaler::fit(const LabeledSeries& train) {
  train.validate();
  if (train.length() == 0) throw InvalidArgument("normalize: empty train series");
  MinMaxScaler s;
  s.lo.assign(train.width(), 0.0);
  s.range.assign(train.width(), 0.0);
  for (std::size_t v = 0; v < train.width(); ++v) {
    double lo = train.at(0, v), hi = lo;
    for (std::size_t t = 1; t < train.length(); ++t) {
      lo = std::min(lo, train.at(t, v));
      hi = std::max(hi, train.at(t, v));
    }
    s.lo[v] = lo;
    s.range[v] = hi - lo;
  }
  return s;
}

LabeledSeries MinMaxScaler::apply(const LabeledSeries& in) const {
  if (in.width() != lo.size()) {
    throw InvalidArgument("scaler fit on " + std::to_string(lo.size()) + " variables, series has " +
                          std::to_string(in.width()));
  }
  LabeledSeries out = in;
  for (std::size_t t = 0; t < out.length(); ++t) {
    for (std::size_t v = 0; v < out.width(); ++v) {
      out.at(t, v) = range[v] > 0.0 ? (in.at(t, v) - lo[v]) / range[v] : 0.0;
    }
  }
  return out;
}

NormalizedPair normalize(const LabeledSeries& train, const LabeledSeries& test) {
  MinMaxScaler scaler = MinMaxScaler::fit(train);
  return {scaler.apply(train), scaler.apply(test), std::move(scaler)};
}

models::WindowSet make_windows(const LabeledSeries& s, std::size_t m, std::size_t stride,
                               bool forecasting) {
  s.validate();
  if (m == 0) throw InvalidArgument("make_windows: window length must be positive");
  if (stride == 0) throw InvalidArgument("make_windows: stride must be positive");
  const std::size_t T = s.length(), d = s.width();
  const std::size_t need = m + (forecasting ? 1 : 0);
  if (T < need) {
    throw InvalidArgument("make_windows: series of length " + std::to_string(T) +
                          " shorter than window " + std::to_string(need));
  }
  const std::size_t n = (T - need) / stride + 1;
  models::WindowSet w;
  w.windows = ad::Tensor({n, m, d});
  if (forecasting) w.next = ad::Tensor({n, d});
  for (std::size_t i = 0; i < n; ++i) {
    const double* src = s.samples.data() + i * stride * d;
    std::copy_n(src, m * d, w.windows.data() + i * m * d);
    if (forecasting) std::copy_n(src + m * d, d, w.next.data() + i * d);
  }
  return w;
}

}  // namespace fedbench::bench
