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

#include <stdexcept>
#include <string>

namespace fedbench {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller handed an operation input that violates its precondition
// (shape mismatch, k > m, empty list, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or missing dataset files.
class DataError : public Error {
 public:
  using Error::Error;
};

// An anomaly plan cannot be realized within the requested test horizon.
class PlanningError : public Error {
 public:
  using Error::Error;
};

// Training diverged (non-finite loss or parameters).
class NumericError : public Error {
 public:
  using Error::Error;
};

// The metric is undefined for the given labels (no positives).
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

}  // namespace fedbench
