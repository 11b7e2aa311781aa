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

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fedbench/series.hpp"

// Synthetic 2-DOF pick-and-place plant: cyclic yaw/pitch references, a
// kinematic PD loop producing the ten observed variables, and design-time
// anomalies of three kinds (pick position, pause delay, drive voltage).
namespace fedbench::plant {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

inline const std::array<std::string, 10> kVariableNames = {
    "voltage0", "voltage1", "current0", "current1", "motorSpd0",
    "motorSpd1", "pitch",   "yaw",      "pitchDot", "yawDot"};

enum Variable : std::size_t {
  kVoltage0 = 0, kVoltage1, kCurrent0, kCurrent1, kMotorSpd0,
  kMotorSpd1, kPitch, kYaw, kPitchDot, kYawDot
};

struct PlantConfig {
  int sim_rate_hz = 500;
  int out_rate_hz = 50;

  Interval pause_range{0.3, 0.7};       // D, seconds
  Interval pick_angle_range{3.0, 5.0};  // P, degrees
  Interval voltage_range{-18.0, 18.0};  // V-bar, volts
  double current_max = 0.540;           // A at |v| = 18 V
  double speed_max = 3050.0;            // rpm at |v| = 18 V
  double pitch_limit = 2.0 * std::numbers::pi / 9.0;

  double place_angle_deg = 90.0;
  double anticipation_angle_deg = 15.0;

  // Phase durations, seconds. Cycle: return ramp (place -> anticipation),
  // pause, approach ramp (-> pick), pick dwell, carry ramp (-> place),
  // release dwell.
  double return_s = 1.5;
  double approach_s = 0.5;
  double pick_dwell_s = 0.8;
  double carry_s = 1.5;
  double release_s = 0.6;

  double pitch_dip_rad = -0.35;
  double dip_ramp_s = 0.25;

  double tracking_tau_s = 0.05;
  double speed_tau_s = 0.1;
  double kp = 250.0;
  double kd = 2.0;

  // Over-voltage episodes drive |v| into [overvoltage_lo, overvoltage_hi].
  double overvoltage_lo = 18.5;
  double overvoltage_hi = 23.5;

  double noise_fraction = 0.005;
  double velocity_span = 4.0;  // rad/s; noise scale of pitchDot / yawDot

  std::size_t cycles_train = 200;
  std::size_t cycles_test = 100;

  void validate() const;
  int decimation() const { return sim_rate_hz / out_rate_hz; }
  std::size_t steps(double seconds) const;
  double nominal_cycle_s() const;
};

enum class AnomalyType : std::uint8_t { kPosition, kDelay, kVoltage };

std::string to_string(AnomalyType t);

struct AnomalyPlan {
  int dataset_id = 0;  // 0 for custom plans
  std::vector<AnomalyType> types;
  double target_frequency = 0.0;  // labeled fraction of the test horizon
  std::size_t event_count = 0;
};

// Rows of the per-dataset anomaly statistics table, ids 1..10.
AnomalyPlan qappd_plan(int dataset_id);

struct CycleParams {
  std::size_t pause_steps = 0;
  double pick_deg = 0.0;
  std::size_t pick_dwell_steps = 0;
  std::optional<AnomalyType> anomaly;  // P or D; V-bar lives in VoltageEpisode
};

struct VoltageEpisode {
  std::size_t start_step = 0;
  std::size_t length_steps = 0;
  std::array<double, 2> phase{};  // per-axis modulation phase
};

struct CycleSchedule {
  std::vector<CycleParams> cycles;
  std::optional<VoltageEpisode> voltage;

  std::size_t anomalous_cycles() const;
};

// Step counts of the fixed phases of one cycle.
struct PhaseSteps {
  std::size_t ret, approach, carry, release;
};
PhaseSteps phase_steps(const PlantConfig& cfg);
std::size_t cycle_steps(const CycleParams& c, const PlantConfig& cfg);

// Normal cycles only.
CycleSchedule normal_schedule(const PlantConfig& cfg, std::uint64_t seed, std::size_t cycles);

// Normal cycles plus the planned events: P/D events on non-adjacent cycles
// chosen uniformly, each labeled for freq * T / count; one V-bar episode of
// freq * T. Throws InvalidArgument for a frequency outside [0, 0.5) and
// PlanningError when the plan cannot be met.
CycleSchedule build_schedule(const AnomalyPlan& plan, const PlantConfig& cfg,
                             std::uint64_t seed, std::size_t cycles);

struct ReferenceSeries {
  std::vector<double> pitch;  // rad
  std::vector<double> yaw;    // rad
  std::vector<std::uint8_t> labels;  // P / D spans
  std::size_t size() const { return yaw.size(); }
};

// References at sim rate. Total length is padded with rest samples to a
// multiple of the decimation factor.
ReferenceSeries synth_trajectory(const CycleSchedule& schedule, const PlantConfig& cfg);

// Kinematic PD loop at sim rate; adds V-bar labels (|v| > 18) to the
// reference labels.
LabeledSeries simulate_controller(const ReferenceSeries& refs, const PlantConfig& cfg,
                                  const CycleSchedule& schedule, std::uint64_t seed);

// Block-mean decimation; a block is labeled if any member is.
LabeledSeries decimate(const LabeledSeries& series, std::size_t factor);

struct DatasetPair {
  LabeledSeries train;
  LabeledSeries test;
};

// Normal-only train series and a test series realizing the dataset's plan,
// both at out_rate_hz.
DatasetPair generate_pair(int dataset_id, const PlantConfig& cfg, std::uint64_t seed);

// Minimum-jerk profile s(tau) = 10 tau^3 - 15 tau^4 + 6 tau^5.
inline double min_jerk(double tau) {
  const double t3 = tau * tau * tau;
  return t3 * (10.0 + tau * (-15.0 + 6.0 * tau));
}

}  // namespace fedbench::plant
