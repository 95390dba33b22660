// Copyright 2026 The xtalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Scenario runners behind the `xtalk` command-line tool.

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "xtalk/beam_optics.hpp"
#include "xtalk/calibration.hpp"
#include "xtalk/crosstalk.hpp"
#include "xtalk/noise.hpp"
#include "xtalk/pulses.hpp"

namespace xtalk {

enum class Scenario {
  XError,
  ZError,
  PhaseScan,
  RabiScan,
  AmplitudeScan,
  DriftMonitor,
  DutyCycleSweep,
  BeamProfile,
  Calibrate,
};

enum class Method { None, Pcc, Sk1, Quad };

Scenario parse_scenario(const std::string& name);
const char* scenario_name(Scenario s);
Method parse_method(const std::string& name);
const char* method_name(Method m);

struct ScenarioConfig {
  Scenario scenario = Scenario::XError;
  Method method = Method::None;
  CrosstalkContext ctx;
  CompensationSetting compensation{1.0, std::numbers::pi};
  std::uint64_t shots = 200;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string output;

  // Scan axis. Unset values fall back to per-scenario defaults.
  std::vector<int> pulses;
  std::vector<double> ratios;
  double start = 0.0;
  double stop = 0.0;
  int points = 0;
  bool range_set = false;

  int periods = 1;                 // phase-scan, n
  std::string channel = "spectator";  // rabi-scan
  double duration_min = 8.0;       // drift-monitor
  double dt_min = 0.05;
  bool mitigation = false;         // duty-cycle-sweep
  double beatnote_sigma_rad = 0.01;
  double sample_interval_s = 1.0;
  double measure_s = 10.0;
  double settle_tau = 30.0;
  std::string component = "total";  // beam-profile: total | device | diffraction | gaussian
  int lit_core = -1;                // -1: middle core
  double relative_phase_rad = 0.0;

  NoisePresets noise;
  DeviceModel device;
  std::string device_map_csv;
  ChainOptions chain;

  std::uint64_t config_hash = 0;
};

/// Parses a JSON config. Unknown keys and out-of-range values raise
/// configuration errors. A `scenario` key, if present, must match.
ScenarioConfig parse_config(const std::string& json_text, Scenario scenario);
ScenarioConfig load_config(const std::string& path, Scenario scenario);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a(const std::string& bytes);

struct ScanResult {
  Scenario scenario = Scenario::XError;
  std::string x_label;
  std::string value_label;
  std::vector<double> x;
  std::vector<double> value_mean;
  std::vector<double> value_sampled;
  std::vector<double> stderr_;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::uint64_t shots = 0;
};

/// One target pi rotation per method; pcc adds the configured tone.
PulseSequence pi_gate(Method method, const CrosstalkContext& ctx, const CompensationSetting& setting);

/// Spectator excited population after `pulses` gates, from |0> (X type) or
/// inside a Ramsey wrapper about X (Z type).
double spectator_error(Method method, const CrosstalkContext& ctx, const CompensationSetting& setting, int pulses,
                       bool ramsey);

ScanResult run_x_error(const ScenarioConfig& cfg);
ScanResult run_z_error(const ScenarioConfig& cfg);
ScanResult run_phase_scan(const ScenarioConfig& cfg);
ScanResult run_rabi_scan(const ScenarioConfig& cfg);
ScanResult run_amplitude_scan(const ScenarioConfig& cfg);
ScanResult run_drift_monitor(const ScenarioConfig& cfg);
ScanResult run_duty_cycle_sweep(const ScenarioConfig& cfg);
ScanResult run_beam_profile(const ScenarioConfig& cfg);
ScanResult run_scenario(const ScenarioConfig& cfg);

std::string to_csv(const ScanResult& result);
const char* build_version();

}  // namespace xtalk
