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

#include "fedbench/plantgen/plantgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fedbench/error.hpp"
#include "fedbench/rng.hpp"

namespace fedbench::plant {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Stream ids for derive_seed.
enum Stream : std::uint64_t {
  kTrainSchedule = 1,
  kTestSchedule = 2,
  kTrainNoise = 3,
  kTestNoise = 4,
};

void append_ramp(std::vector<double>& out, double from, double to, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    out.push_back(from + (to - from) * min_jerk(static_cast<double>(j) / static_cast<double>(n)));
  }
}

void append_hold(std::vector<double>& out, double value, std::size_t n) {
  out.insert(out.end(), n, value);
}

// Pitch dips smoothly to `depth` and back within a dwell of n steps.
void append_dip(std::vector<double>& out, double depth, std::size_t n, std::size_t ramp) {
  ramp = std::min(ramp, n / 2);
  append_ramp(out, 0.0, depth, ramp);
  append_hold(out, depth, n - 2 * ramp);
  append_ramp(out, depth, 0.0, ramp);
}

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

void PlantConfig::validate() const {
  if (sim_rate_hz <= 0 || out_rate_hz <= 0 || sim_rate_hz % out_rate_hz != 0) {
    throw InvalidArgument("sim_rate_hz must be a positive multiple of out_rate_hz");
  }
  for (const Interval* r : {&pause_range, &pick_angle_range, &voltage_range}) {
    if (!(r->lo <= r->hi)) throw InvalidArgument("plant ranges must be non-empty intervals");
  }
  for (double d : {return_s, approach_s, pick_dwell_s, carry_s, release_s}) {
    if (!(d > 0.0)) throw InvalidArgument("phase durations must be positive");
  }
  if (pick_dwell_s < 2 * dip_ramp_s || release_s < 2 * dip_ramp_s) {
    throw InvalidArgument("dwells must fit the pitch dip ramps");
  }
  if (!(tracking_tau_s > 0.0) || !(speed_tau_s > 0.0)) {
    throw InvalidArgument("time constants must be positive");
  }
  if (!(overvoltage_lo > voltage_range.hi) || overvoltage_hi < overvoltage_lo) {
    throw InvalidArgument("over-voltage band must lie above the nominal voltage range");
  }
  if (!(noise_fraction >= 0.0)) throw InvalidArgument("noise_fraction must be >= 0");
}

std::size_t PlantConfig::steps(double seconds) const {
  return static_cast<std::size_t>(std::llround(seconds * sim_rate_hz));
}

double PlantConfig::nominal_cycle_s() const {
  return return_s + 0.5 * (pause_range.lo + pause_range.hi) + approach_s + pick_dwell_s +
         carry_s + release_s;
}

std::string to_string(AnomalyType t) {
  switch (t) {
    case AnomalyType::kPosition: return "P";
    case AnomalyType::kDelay: return "D";
    case AnomalyType::kVoltage: return "V";
  }
  return "?";
}

AnomalyPlan qappd_plan(int dataset_id) {
  using enum AnomalyType;
  struct Row {
    std::vector<AnomalyType> types;
    double frequency;
    std::size_t count;
  };
  static const std::array<Row, 10> kRows = {{
      {{kPosition, kDelay}, 0.023, 4},
      {{kDelay}, 0.013, 3},
      {{kPosition}, 0.021, 4},
      {{kPosition}, 0.027, 5},
      {{kDelay}, 0.010, 3},
      {{kPosition, kDelay}, 0.010, 2},
      {{kVoltage}, 0.101, 1},
      {{kDelay}, 0.010, 3},
      {{kPosition, kDelay}, 0.020, 4},
      {{kPosition, kDelay}, 0.023, 4},
  }};
  if (dataset_id < 1 || dataset_id > 10) {
    throw InvalidArgument("dataset_id must be in 1..10, got " + std::to_string(dataset_id));
  }
  const Row& r = kRows[static_cast<std::size_t>(dataset_id - 1)];
  return AnomalyPlan{dataset_id, r.types, r.frequency, r.count};
}

std::size_t CycleSchedule::anomalous_cycles() const {
  return static_cast<std::size_t>(
      std::count_if(cycles.begin(), cycles.end(), [](const CycleParams& c) { return c.anomaly.has_value(); }));
}

PhaseSteps phase_steps(const PlantConfig& cfg) {
  return PhaseSteps{cfg.steps(cfg.return_s), cfg.steps(cfg.approach_s), cfg.steps(cfg.carry_s),
                    cfg.steps(cfg.release_s)};
}

std::size_t cycle_steps(const CycleParams& c, const PlantConfig& cfg) {
  const PhaseSteps p = phase_steps(cfg);
  return p.ret + c.pause_steps + p.approach + c.pick_dwell_steps + p.carry + p.release;
}

CycleSchedule normal_schedule(const PlantConfig& cfg, std::uint64_t seed, std::size_t cycles) {
  cfg.validate();
  Rng rng(seed);
  CycleSchedule schedule;
  schedule.cycles.reserve(cycles);
  const std::size_t lo = cfg.steps(cfg.pause_range.lo), hi = cfg.steps(cfg.pause_range.hi);
  for (std::size_t i = 0; i < cycles; ++i) {
    CycleParams c;
    c.pause_steps = lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
    c.pick_deg = rng.uniform(cfg.pick_angle_range.lo, cfg.pick_angle_range.hi);
    c.pick_dwell_steps = cfg.steps(cfg.pick_dwell_s);
    schedule.cycles.push_back(c);
  }
  return schedule;
}

CycleSchedule build_schedule(const AnomalyPlan& plan, const PlantConfig& cfg, std::uint64_t seed,
                             std::size_t cycles) {
  CycleSchedule schedule = normal_schedule(cfg, seed, cycles);
  if (plan.target_frequency == 0.0 || plan.event_count == 0) return schedule;

  if (!(plan.target_frequency > 0.0 && plan.target_frequency < 0.5)) {
    throw InvalidArgument("anomaly frequency must lie in [0, 0.5)");
  }
  if (plan.types.empty()) throw InvalidArgument("anomaly plan lists no types");
  const bool voltage = std::find(plan.types.begin(), plan.types.end(), AnomalyType::kVoltage) !=
                       plan.types.end();
  // Separate stream so that the normal cycle draws are unaffected by the plan.
  Rng rng(derive_seed(seed, 0xa11));
  const double f = plan.target_frequency;

  if (voltage) {
    if (plan.types.size() != 1 || plan.event_count != 1) {
      throw PlanningError("a voltage anomaly is a single contiguous episode of its own dataset");
    }
    std::vector<std::size_t> starts;
    std::size_t total = 0;
    for (const auto& c : schedule.cycles) {
      starts.push_back(total);
      total += cycle_steps(c, cfg);
    }
    const auto length = static_cast<std::size_t>(std::llround(f * static_cast<double>(total)));
    std::vector<std::size_t> fits;
    for (std::size_t i = 0; i < starts.size(); ++i) {
      if (starts[i] + length <= total) fits.push_back(i);
    }
    if (length == 0 || fits.empty()) {
      throw PlanningError("voltage episode does not fit the test horizon");
    }
    VoltageEpisode ep;
    ep.start_step = starts[fits[rng.below(fits.size())]];
    ep.length_steps = length;
    ep.phase = {rng.uniform(0.0, 2.0 * std::numbers::pi), rng.uniform(0.0, 2.0 * std::numbers::pi)};
    schedule.voltage = ep;
    return schedule;
  }

  const std::size_t k = plan.event_count;
  if (2 * k > cycles + 1) {
    throw PlanningError(std::to_string(k) + " non-adjacent events do not fit in " +
                        std::to_string(cycles) + " cycles");
  }
  // Uniform k-subset without adjacency: sorted k-subset of [0, n-k+1), then
  // shift the j-th pick by j.
  std::vector<std::size_t> pool(cycles - k + 1);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  rng.shuffle(pool);
  std::vector<std::size_t> picks(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(picks.begin(), picks.end());
  for (std::size_t j = 0; j < k; ++j) picks[j] += j;

  std::vector<AnomalyType> kinds;
  for (std::size_t j = 0; j < k; ++j) kinds.push_back(plan.types[j % plan.types.size()]);
  rng.shuffle(kinds);

  const PhaseSteps ph = phase_steps(cfg);
  std::size_t fixed = 0;
  for (const auto& c : schedule.cycles) fixed += cycle_steps(c, cfg);
  for (std::size_t j = 0; j < k; ++j) {
    const CycleParams& c = schedule.cycles[picks[j]];
    fixed -= kinds[j] == AnomalyType::kDelay ? c.pause_steps : ph.approach + c.pick_dwell_steps;
  }
  // count * L = f * (fixed + count * L)
  const double span_s = f * static_cast<double>(fixed) /
                        (static_cast<double>(k) * (1.0 - f)) / cfg.sim_rate_hz;
  const std::size_t span = cfg.steps(span_s);

  for (std::size_t j = 0; j < k; ++j) {
    CycleParams& c = schedule.cycles[picks[j]];
    c.anomaly = kinds[j];
    if (kinds[j] == AnomalyType::kDelay) {
      const double pause_s = static_cast<double>(span) / cfg.sim_rate_hz;
      if (span == 0 || cfg.pause_range.contains(pause_s)) {
        throw PlanningError("delay event of " + std::to_string(pause_s) +
                            " s would fall inside the normal pause range");
      }
      c.pause_steps = span;
    } else {
      const std::size_t nominal = cfg.steps(cfg.pick_dwell_s);
      if (span < ph.approach + nominal) {
        throw PlanningError("position event of " +
                            std::to_string(static_cast<double>(span) / cfg.sim_rate_hz) +
                            " s is shorter than approach plus nominal dwell");
      }
      c.pick_dwell_steps = span - ph.approach;
      c.pick_deg = rng.uniform(cfg.pick_angle_range.hi + 2.0, cfg.pick_angle_range.hi + 6.0);
    }
  }
  return schedule;
}

ReferenceSeries synth_trajectory(const CycleSchedule& schedule, const PlantConfig& cfg) {
  ReferenceSeries refs;
  if (schedule.cycles.empty()) return refs;
  const PhaseSteps ph = phase_steps(cfg);
  const std::size_t dip = cfg.steps(cfg.dip_ramp_s);
  const double place = cfg.place_angle_deg * kDegToRad;
  const double anticipation = cfg.anticipation_angle_deg * kDegToRad;

  std::size_t total = 0;
  for (const auto& c : schedule.cycles) total += cycle_steps(c, cfg);
  refs.yaw.reserve(total + cfg.decimation());
  refs.pitch.reserve(total + cfg.decimation());
  refs.labels.reserve(total + cfg.decimation());

  for (const auto& c : schedule.cycles) {
    const double pick = c.pick_deg * kDegToRad;
    const bool delay = c.anomaly == AnomalyType::kDelay;
    const bool position = c.anomaly == AnomalyType::kPosition;

    append_ramp(refs.yaw, place, anticipation, ph.ret);
    append_hold(refs.pitch, 0.0, ph.ret);
    refs.labels.insert(refs.labels.end(), ph.ret, 0);

    append_hold(refs.yaw, anticipation, c.pause_steps);
    append_hold(refs.pitch, 0.0, c.pause_steps);
    refs.labels.insert(refs.labels.end(), c.pause_steps, delay ? 1 : 0);

    append_ramp(refs.yaw, anticipation, pick, ph.approach);
    append_hold(refs.pitch, 0.0, ph.approach);
    refs.labels.insert(refs.labels.end(), ph.approach, position ? 1 : 0);

    append_hold(refs.yaw, pick, c.pick_dwell_steps);
    append_dip(refs.pitch, cfg.pitch_dip_rad, c.pick_dwell_steps, dip);
    refs.labels.insert(refs.labels.end(), c.pick_dwell_steps, position ? 1 : 0);

    append_ramp(refs.yaw, pick, place, ph.carry);
    append_hold(refs.pitch, 0.0, ph.carry);
    refs.labels.insert(refs.labels.end(), ph.carry, 0);

    append_hold(refs.yaw, place, ph.release);
    append_dip(refs.pitch, cfg.pitch_dip_rad, ph.release, dip);
    refs.labels.insert(refs.labels.end(), ph.release, 0);
  }
  const std::size_t factor = static_cast<std::size_t>(cfg.decimation());
  const std::size_t pad = (factor - refs.yaw.size() % factor) % factor;
  append_hold(refs.yaw, place, pad);
  append_hold(refs.pitch, 0.0, pad);
  refs.labels.insert(refs.labels.end(), pad, 0);
  return refs;
}

LabeledSeries simulate_controller(const ReferenceSeries& refs, const PlantConfig& cfg,
                                  const CycleSchedule& schedule, std::uint64_t seed) {
  cfg.validate();
  const std::size_t n = refs.size();
  LabeledSeries out;
  out.variables.assign(kVariableNames.begin(), kVariableNames.end());
  out.rate_hz = cfg.sim_rate_hz;
  out.samples.resize(n * kVariableNames.size());
  out.labels = refs.labels;
  if (n == 0) return out;

  Rng noise_rng(seed);
  const double dt = 1.0 / cfg.sim_rate_hz;
  const double vmax = cfg.voltage_range.hi;
  const double vmin = cfg.voltage_range.lo;
  const double amps_per_volt = cfg.current_max / vmax;
  const double period = cfg.nominal_cycle_s();
  const double mid = 0.5 * (cfg.overvoltage_lo + cfg.overvoltage_hi);
  const double amp = 0.5 * (cfg.overvoltage_hi - cfg.overvoltage_lo);

  const double nf = cfg.noise_fraction;
  const std::array<double, 10> noise_std = {
      nf * (vmax - vmin), nf * (vmax - vmin), nf * cfg.current_max, nf * cfg.current_max,
      nf * cfg.speed_max, nf * cfg.speed_max, nf * 2.0 * cfg.pitch_limit,
      nf * 2.0 * std::numbers::pi, nf * cfg.velocity_span, nf * cfg.velocity_span};

  std::array<const std::vector<double>*, 2> ref = {&refs.pitch, &refs.yaw};
  std::array<double, 2> angle = {refs.pitch[0], refs.yaw[0]};
  std::array<double, 2> prev_error = {0.0, 0.0};
  std::array<double, 2> speed = {0.0, 0.0};
  std::array<double, 2> sign = {1.0, 1.0};
  const auto& episode = schedule.voltage;

  for (std::size_t t = 0; t < n; ++t) {
    const bool overdrive = episode && t >= episode->start_step &&
                           t < episode->start_step + episode->length_steps;
    std::array<double, 10> row{};
    bool over_range = false;
    for (std::size_t a = 0; a < 2; ++a) {
      const double r = (*ref[a])[t];
      const double error = r - angle[a];
      const double error_rate = t == 0 ? 0.0 : (error - prev_error[a]) / dt;
      prev_error[a] = error;
      const double command = cfg.kp * error + cfg.kd * error_rate;
      double applied;
      if (overdrive) {
        if (std::abs(command) > 0.5) sign[a] = command > 0 ? 1.0 : -1.0;
        const double time = static_cast<double>(t) * dt;
        applied = sign[a] * (mid + amp * std::sin(2.0 * std::numbers::pi * time / period +
                                                  episode->phase[a]));
      } else {
        applied = clamp(command, vmin, vmax);
      }
      over_range = over_range || applied > vmax || applied < vmin;
      const double magnitude = std::abs(applied);
      speed[a] += dt / cfg.speed_tau_s * (magnitude / vmax * cfg.speed_max - speed[a]);
      const double rate = error / cfg.tracking_tau_s;

      row[kVoltage0 + a] = applied;
      row[kCurrent0 + a] = magnitude * amps_per_volt;
      row[kMotorSpd0 + a] = speed[a];
      row[a == 0 ? kPitch : kYaw] = angle[a];
      row[a == 0 ? kPitchDot : kYawDot] = rate;
      angle[a] += dt * rate;
    }
    for (std::size_t v = 0; v < row.size(); ++v) {
      if (noise_std[v] > 0.0) row[v] += noise_std[v] * noise_rng.normal();
    }
    if (!overdrive) {
      row[kVoltage0] = clamp(row[kVoltage0], vmin, vmax);
      row[kVoltage1] = clamp(row[kVoltage1], vmin, vmax);
    }
    row[kCurrent0] = std::max(0.0, row[kCurrent0]);
    row[kCurrent1] = std::max(0.0, row[kCurrent1]);
    std::copy(row.begin(), row.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(t * row.size()));
    if (over_range) out.labels[t] = 1;
  }
  return out;
}

LabeledSeries decimate(const LabeledSeries& series, std::size_t factor) {
  if (factor == 0 || series.length() % factor != 0) {
    throw InvalidArgument("decimation factor " + std::to_string(factor) +
                          " does not divide series length " + std::to_string(series.length()));
  }
  if (factor == 1) return series;
  const std::size_t d = series.width();
  const std::size_t rows = series.length() / factor;
  LabeledSeries out;
  out.variables = series.variables;
  out.rate_hz = series.rate_hz / static_cast<double>(factor);
  out.samples.assign(rows * d, 0.0);
  out.labels.assign(rows, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < factor; ++j) {
      const std::size_t t = r * factor + j;
      for (std::size_t v = 0; v < d; ++v) out.samples[r * d + v] += series.at(t, v);
      if (series.labels[t]) out.labels[r] = 1;
    }
    for (std::size_t v = 0; v < d; ++v) out.samples[r * d + v] /= static_cast<double>(factor);
  }
  return out;
}

DatasetPair generate_pair(int dataset_id, const PlantConfig& cfg, std::uint64_t seed) {
  const AnomalyPlan plan = qappd_plan(dataset_id);
  cfg.validate();
  const auto id = static_cast<std::uint64_t>(dataset_id);
  const std::uint64_t base = derive_seed(seed, id);
  const std::size_t factor = static_cast<std::size_t>(cfg.decimation());

  const CycleSchedule train_schedule =
      normal_schedule(cfg, derive_seed(base, kTrainSchedule), cfg.cycles_train);
  const CycleSchedule test_schedule =
      build_schedule(plan, cfg, derive_seed(base, kTestSchedule), cfg.cycles_test);

  DatasetPair pair;
  pair.train = decimate(simulate_controller(synth_trajectory(train_schedule, cfg), cfg,
                                            train_schedule, derive_seed(base, kTrainNoise)),
                        factor);
  pair.test = decimate(simulate_controller(synth_trajectory(test_schedule, cfg), cfg,
                                           test_schedule, derive_seed(base, kTestNoise)),
                       factor);
  return pair;
}

}  // namespace fedbench::plant
