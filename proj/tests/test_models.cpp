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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fedbench/autodiff/param_vector.hpp"
#include "fedbench/bench/dataset.hpp"
#include "fedbench/error.hpp"
#include "fedbench/models/deepant.hpp"
#include "fedbench/models/detector.hpp"
#include "fedbench/models/lstm_ae.hpp"
#include "fedbench/models/usad.hpp"
#include "oracles/fixtures.hpp"

using namespace fedbench;
using namespace fedbench::models;

namespace {

ModelSpec spec_for(ModelKind kind) {
  ModelSpec s;
  s.kind = kind;
  s.window = 12;
  s.variables = 2;
  s.latent = 4;
  s.kernel = 3;
  s.deepant_channels = 4;
  return s;
}

WindowSet sine_windows(bool forecasting, std::size_t length = 240, std::size_t stride = 1) {
  return bench::make_windows(oracle::sine_series(length), 12, stride, forecasting);
}

struct Trained {
  ad::ParamVector params;
  double first_loss = 0.0;
  double last_loss = 0.0;
};

Trained train(const Detector& det, const WindowSet& w, std::size_t epochs, double lr,
              std::uint64_t seed = 1, InitMode init = InitMode::kGlorot) {
  Trained t{det.init(seed, init)};
  std::vector<ad::SgdState> opt(det.optimizer_count());
  const ad::SgdConfig cfg{lr, 0.9};
  t.first_loss = det.loss(t.params, w, 1);
  for (std::size_t e = 1; e <= epochs; ++e) train_epoch(det, t.params, opt, w, 16, e, cfg);
  t.last_loss = det.loss(t.params, w, 1);
  return t;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  return v[static_cast<std::size_t>(q * static_cast<double>(v.size() - 1))];
}

// Adds a spike of 10x the signal range at the given window's last sample.
WindowSet spiked(const WindowSet& w, std::size_t index, bool at_target) {
  WindowSet out = w;
  const std::size_t m = w.length(), d = w.width();
  if (at_target) {
    out.next[index * d] += 8.0;
  } else {
    out.windows[(index * m + m - 1) * d] += 8.0;
  }
  return out;
}

void check_spike_ranking(const Detector& det, const ad::ParamVector& params, const WindowSet& w) {
  const std::vector<double> base = det.score(params, w);
  for (double s : base) {
    CHECK(s >= 0.0);
    CHECK(std::isfinite(s));
  }
  const std::size_t k = w.count() / 2;
  const std::vector<double> hit = det.score(params, spiked(w, k, det.forecasting()));
  CHECK(hit[k] > base[k]);
  CHECK(hit[k] > percentile(base, 0.95));
}

}  // namespace

TEST_CASE("model spec validation") {
  ModelSpec s = spec_for(ModelKind::kUsad);
  s.usad_alpha = 0.7;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = spec_for(ModelKind::kDeepAnt);
  s.kernel = 12;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = spec_for(ModelKind::kDeepAnt);
  s.window = 8;
  CHECK_THROWS_AS(make_detector(s), InvalidArgument);
  CHECK(parse_model_kind("lstm-ae") == ModelKind::kLstmAe);
  CHECK_THROWS(parse_model_kind("tranad"));
}

TEST_CASE("windows_to_point_scores") {
  const std::vector<double> three{1, 2, 3};
  CHECK(windows_to_point_scores(three, 3, 5).scores == std::vector<double>{1, 1, 1, 2, 3});
  CHECK(windows_to_point_scores(std::vector<double>{4}, 3, 3).scores == std::vector<double>{4, 4, 4});
  CHECK(windows_to_point_scores(three, 1, 3).scores == three);
  CHECK_THROWS_AS(windows_to_point_scores(three, 3, 6), InvalidArgument);
}

TEST_CASE("USAD") {
  const Usad det(spec_for(ModelKind::kUsad));
  const WindowSet w = sine_windows(false);
  SUBCASE("epoch 1 has no adversarial term") {
    ModelSpec s = spec_for(ModelKind::kUsad);
    s.usad_alpha = 1.0;
    s.usad_beta = 0.0;
    const Usad ae1(s);
    const ad::ParamVector p = det.init(3);
    const StepLosses l = det.losses(p, w, 1);
    const std::vector<double> e1 = ae1.score(p, w);
    double mean = 0.0;
    for (double v : e1) mean += v / static_cast<double>(e1.size());
    CHECK(l.loss == doctest::Approx(mean).epsilon(1e-12));
    CHECK_THROWS_AS(det.losses(p, w, 0), InvalidArgument);
  }
  SUBCASE("alpha 1 beta 0 scores the first autoencoder") {
    ModelSpec s = spec_for(ModelKind::kUsad);
    s.usad_alpha = 1.0;
    s.usad_beta = 0.0;
    const Usad ae1(s);
    const ad::ParamVector p = det.init(4);
    const std::vector<double> score = ae1.score(p, w);
    // Plain forward of D1(E(W)) over the restored tensors.
    const auto named = ad::restore_params(p);
    const std::size_t flat = 24;
    for (std::size_t i = 0; i < 5; ++i) {
      std::vector<double> x(w.windows.data() + i * flat, w.windows.data() + (i + 1) * flat);
      for (std::size_t layer = 0; layer < 6; ++layer) {
        const ad::Tensor& W = named[2 * layer].tensor;
        const ad::Tensor& b = named[2 * layer + 1].tensor;
        std::vector<double> y(W.extent(1));
        for (std::size_t j = 0; j < y.size(); ++j) {
          double acc = b[j];
          for (std::size_t k = 0; k < x.size(); ++k) acc += x[k] * W[k * y.size() + j];
          y[j] = layer == 5 ? std::tanh(acc) : std::max(0.0, acc);
        }
        x = y;
      }
      double err = 0.0;
      for (std::size_t k = 0; k < flat; ++k) {
        const double diff = w.windows[i * flat + k] - x[k];
        err += diff * diff / static_cast<double>(flat);
      }
      CHECK(score[i] == doctest::Approx(err).epsilon(1e-12));
    }
  }
  SUBCASE("zero windows and zero parameters") {
    WindowSet z = w;
    std::fill(z.windows.data(), z.windows.data() + z.windows.size(), 0.0);
    ad::ParamVector p = det.init(1, InitMode::kZeros);
    std::vector<ad::SgdState> opt(2);
    const StepLosses l = det.train_step(p, opt, z, 3, ad::SgdConfig{0.1, 0.0});
    CHECK(l.loss == 0.0);
    CHECK(l.aux == 0.0);
    CHECK(det.score(p, z) == std::vector<double>(z.count(), 0.0));
  }
  SUBCASE("training lowers the loss and ranks a spike") {
    const Trained t = train(det, w, 50, 0.05);
    CHECK(t.last_loss < 0.5 * t.first_loss);
    check_spike_ranking(det, t.params, w);
  }
  SUBCASE("training is deterministic") {
    const Trained a = train(det, w, 3, 0.05, 7);
    INFO(a.first_loss, " ", a.last_loss);
    CHECK(std::isfinite(a.last_loss));
    CHECK(a.params == train(det, w, 3, 0.05, 7).params);
  }
}

TEST_CASE("DeepAnT") {
  const DeepAnt det(spec_for(ModelKind::kDeepAnt));
  CHECK(det.forecasting());
  CHECK(det.span() == 13);
  const WindowSet w = sine_windows(true);
  SUBCASE("constant series is learned") {
    const WindowSet c = bench::make_windows(oracle::constant_series(200, 2, 0.6), 12, 1, true);
    const Trained t = train(det, c, 20, 0.02);
    CHECK(t.last_loss < 1e-3);
  }
  SUBCASE("zero last layer predicts zero") {
    ad::ParamVector p = det.init(2);
    for (const char* g : {"dense2.W", "dense2.b"}) {
      const auto span = p.group(p.index_of(g));
      std::fill(span.begin(), span.end(), 0.0);
    }
    const ad::Tensor y = det.predict(p, w);
    CHECK(std::all_of(y.data(), y.data() + y.size(), [](double v) { return v == 0.0; }));
    double msq = 0.0;
    for (std::size_t i = 0; i < w.next.size(); ++i) msq += w.next[i] * w.next[i];
    CHECK(det.loss(p, w, 1) == doctest::Approx(msq / static_cast<double>(w.next.size())).epsilon(1e-14));
  }
  SUBCASE("perfect forecast scores zero") {
    ad::ParamVector p = det.init(2);
    WindowSet exact = w;
    exact.next = det.predict(p, w);
    CHECK(det.score(p, exact) == std::vector<double>(w.count(), 0.0));
  }
  SUBCASE("training lowers the loss and ranks a spike") {
    const Trained t = train(det, w, 30, 0.02);
    CHECK(t.last_loss < 0.5 * t.first_loss);
    check_spike_ranking(det, t.params, w);
  }
}

TEST_CASE("LSTM-AE") {
  const LstmAe det(spec_for(ModelKind::kLstmAe));
  const WindowSet w = sine_windows(false, 200, 2);
  SUBCASE("zero windows and zero parameters") {
    WindowSet z = w;
    std::fill(z.windows.data(), z.windows.data() + z.windows.size(), 0.0);
    const ad::ParamVector p = det.init(1, InitMode::kZeros);
    CHECK(det.loss(p, z, 1) == 0.0);
    CHECK(det.score(p, z) == std::vector<double>(z.count(), 0.0));
  }
  SUBCASE("training lowers the loss, beats the untrained copy, ranks a spike") {
    const Trained t = train(det, w, 50, 0.1);
    CHECK(t.last_loss < 0.5 * t.first_loss);
    CHECK(2.0 * t.last_loss <= t.first_loss);
    check_spike_ranking(det, t.params, w);
  }
}
