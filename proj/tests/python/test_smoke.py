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

import math

import numpy as np
import pytest

import fedbench


def test_generate_pair_follows_plan():
    train, test = fedbench.generate_pair(7, cycles_train=20, cycles_test=40)
    assert train.width == 10
    assert "yaw" in train.variables
    assert sum(train.labels) == 0
    plan = fedbench.plan(7)
    assert plan["events"] == 1
    frac = sum(test.labels) / test.length
    assert abs(frac - plan["frequency"]) < 0.002
    assert test.values().shape == (test.length, 10)


def test_metrics_examples():
    assert fedbench.best_f1([0.9, 0.1, 0.8, 0.2], [0, 0, 1, 1]) == pytest.approx((0.8, 0.2))
    assert fedbench.auc_pr([0.9, 0.8, 0.7], [1, 0, 1]) == pytest.approx(5 / 6)
    assert fedbench.composite_f1([0, 1, 0, 0], [0, 1, 1, 0], 0.5) == 1.0
    scores, labels = [0.3, 0.1, 0.7, 0.2, 0.9], [0, 0, 1, 0, 1]
    assert fedbench.vus_pr(scores, labels, 0) == fedbench.auc_pr(scores, labels)
    report = fedbench.evaluate([0.1, 0.2], [0, 0])
    assert report["auc_pr"] is None and report["f1"] is None
    with pytest.raises(fedbench.UndefinedMetric):
        fedbench.auc_pr([0.1, 0.2], [0, 0])


def test_fedavg_aggregate():
    assert fedbench.fedavg_aggregate([[0, 2], [4, 6]], [1, 3]) == pytest.approx([3, 5])
    same = [0.1, -2.5, 1e-300]
    assert fedbench.fedavg_aggregate([same, same], [2, 5]) == same
    with pytest.raises(fedbench.InvalidArgument):
        fedbench.fedavg_aggregate([[0, 1], [1, 2, 3]], [1, 1])


def test_normalize_and_windows():
    train = fedbench.Series(["a", "b"], [[0, 5], [10, 5]])
    test = fedbench.Series(["a", "b"], [[15, 5], [5, 7], [0, 0]])
    ntrain, ntest = fedbench.normalize(train, test)
    assert ntrain.values().tolist() == [[0, 0], [1, 0]]
    assert ntest.column("a") == pytest.approx([1.5, 0.5, 0.0])
    windows, nxt = fedbench.make_windows(ntest, 2, 1, forecasting=True)
    assert windows.shape == (1, 2, 2)
    assert nxt.shape == (1, 2)
    windows, nxt = fedbench.make_windows(ntest, 2)
    assert windows.shape == (2, 2, 2) and nxt is None
    with pytest.raises(fedbench.InvalidArgument):
        fedbench.make_windows(ntest, 4)


def test_run_experiment(tmp_path):
    config = "\n".join([
        "paradigm = cl, fl",
        "method = deepant",
        "pairs = 7",
        "cycles_train = 20",
        "cycles_test = 40",
        "window = 12",
        "channels = 4",
        "latent = 8",
        "lr = 0.01",
        "momentum = 0.9",
        "batch_size = 64",
        "rounds = 2",
        "seeds = 1, 2",
    ])
    out = fedbench.run_experiment(config, str(tmp_path / "run"))
    assert set(out) == {"cl", "fl"}
    for summary in out.values():
        assert not summary["partial"]
        assert summary["stats"]["auc_pr"]["n"] == 2
        values = [s["best"]["auc_pr"] for s in summary["seeds"]]
        mean = sum(values) / 2
        assert summary["stats"]["auc_pr"]["mean"] == pytest.approx(mean, rel=1e-12)
        assert summary["stats"]["auc_pr"]["std"] == pytest.approx(
            math.sqrt(sum((v - mean) ** 2 for v in values)), rel=1e-9, abs=1e-15)
    csv = fedbench.ratio_report(str(tmp_path / "run"))
    assert csv.splitlines()[0].startswith("method,dataset,metric,cl,fl,hfl")
    with pytest.raises(fedbench.ConfigError):
        fedbench.run_experiment("colour = red")
