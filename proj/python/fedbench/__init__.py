# Copyright 2026 The fedbench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Federated time-series anomaly detection benchmark.

Thin package over the compiled core: QAPPD generation, preprocessing,
FedAvg aggregation, metrics and the experiment runner.
"""

from ._core import (
    ConfigError,
    DataError,
    Error,
    InvalidArgument,
    NumericError,
    PlanningError,
    Series,
    UndefinedMetric,
    auc_pr,
    best_f1,
    composite_f1,
    evaluate,
    fedavg_aggregate,
    generate_pair,
    make_windows,
    normalize,
    plan,
    ratio_report,
    run_experiment,
    vus_pr,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Error",
    "InvalidArgument",
    "NumericError",
    "PlanningError",
    "Series",
    "UndefinedMetric",
    "auc_pr",
    "best_f1",
    "composite_f1",
    "evaluate",
    "fedavg_aggregate",
    "generate_pair",
    "make_windows",
    "normalize",
    "plan",
    "ratio_report",
    "run_experiment",
    "vus_pr",
]
