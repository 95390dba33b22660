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

// Phase-noise processes and AOM hardware models.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace xtalk {

enum class DriftPreset { Custom, Enclosed, Exposed };

/// Slow differential drift: a linear ramp plus a Wiener process. The random
/// walk is scaled so that the standard deviation of a trace of length
/// `window_min` (ramp included) equals `sigma_rad` in expectation.
struct DriftProcess {
  double rate_rad_per_min = 0.0;
  double sigma_rad = 0.0;
  double window_min = 8.0;
  DriftPreset preset = DriftPreset::Custom;

  static DriftProcess enclosed();
  static DriftProcess exposed();
  void validate() const;
  /// Wiener diffusion constant, rad^2/min.
  double diffusion() const;
};

/// Phase trace sampled at t = 0, dt, 2 dt, ... up to `duration_min`.
std::vector<double> sample_slow_drift(const DriftProcess& process, double duration_min, double dt_min,
                                      std::uint64_t seed);

/// Population standard deviation of a trace.
double trace_std(const std::vector<double>& trace);

struct AomModel {
  double center_mhz = 150.0;
  double efficiency_width_mhz = 50.0 / std::sqrt(2.0 * std::log(1e4));  // efficiency(100 MHz) = 1e-4
  double absorption_center_mhz = 150.0;
  double absorption_hwhm_mhz = 50.0;    // absorption(100 MHz) = 0.5
  // Set by calibrate_k_phi; default_aom_model() does so.
  double k_phi_rad_per_w_s = 0.0;
  double tau_s = 10.0;
  double max_power_w = 1.0;
  // Fractional loss of phase coupling for heat deposited by a tone that
  // does not diffract; a far-detuned tone heats a slightly different volume.
  double phase_weight_mismatch = 0.1;

  void validate() const;
};

double diffraction_efficiency(const AomModel& model, double f_mhz);
double rf_absorption(const AomModel& model, double f_mhz);
/// Thermal phase coupling of a tone at f relative to the carrier.
double phase_weight(const AomModel& model, double f_mhz);

struct RfDrive {
  double power_w = 0.0;
  double freq_mhz = 150.0;
};

/// Channel 0 is the target AOM, channel 1 the spectator AOM.
struct DutyCycleState {
  std::array<double, 2> filtered_power{0.0, 0.0};  // W, phase-weighted absorbed power
  double phase = 0.0;                               // rad, target minus spectator
  double clock_s = 0.0;
};

/// Exact update for drives held constant over dt.
DutyCycleState step_duty_cycle(const DutyCycleState& state, const AomModel& model,
                               const std::array<RfDrive, 2>& drive, double dt_s);

/// Pulse pattern repeated every cycle. The target AOM runs a gate of
/// `gate_s` followed by a probe of `probe_s`; the spectator AOM runs only the
/// probe. With mitigation, the spectator receives an off-resonant tone during
/// the gate.
struct DutyCycleSchedule {
  double probe_s = 100e-6;
  double overhead_s = 1e-3;
  double mitigation_power_w = 1.0;
  double mitigation_freq_mhz = 100.0;
  bool mitigation = false;

  /// Gate length for the duty-cycle ratio t_spec / t_target.
  double gate_length(double ratio) const;
};

/// Carrier power that absorbs as much as the mitigation tone does.
double matched_drive_power(const AomModel& model, const DutyCycleSchedule& schedule);

/// Ordered (drive, duration) pieces of one cycle.
std::vector<std::pair<std::array<RfDrive, 2>, double>> duty_cycle_pieces(const AomModel& model,
                                                                         const DutyCycleSchedule& schedule,
                                                                         double ratio);

/// Drift rate (rad/s) after settling for `settle_tau` time constants,
/// measured over whole cycles spanning at least `measure_s`.
double duty_cycle_drift_rate(const AomModel& model, const DutyCycleSchedule& schedule, double ratio,
                             double settle_tau = 30.0, double measure_s = 5.0);

struct PhaseTrace {
  std::vector<double> time_s;  // from the end of settling
  std::vector<double> phase_rad;
};

/// Differential phase after settling, read at the first cycle boundary past
/// each multiple of `interval_s` up to `duration_s`.
PhaseTrace duty_cycle_phase_trace(const AomModel& model, const DutyCycleSchedule& schedule, double ratio,
                                  double settle_tau, double duration_s, double interval_s);

/// Fixed point of the linear model: k_phi times the cycle-averaged weighted
/// absorbed-power difference.
double duty_cycle_drift_rate_analytic(const AomModel& model, const DutyCycleSchedule& schedule, double ratio);

/// k_phi such that the unmitigated rate at `ratio` equals `rate_rad_per_s`.
double calibrate_k_phi(const AomModel& model, const DutyCycleSchedule& schedule, double ratio,
                       double rate_rad_per_s);

/// Default constants with k_phi set for 0.35 rad/s unmitigated at ratio 1e-3.
AomModel default_aom_model();

struct BeatnoteSetup {
  double f1_mhz = 150.0;
  double f2_mhz = 152.0;
  double probe_s = 100e-6;

  void validate() const;
  double delta_f_mhz() const { return f2_mhz - f1_mhz; }
};

/// Wraps to (-pi, pi].
double wrap_phase(double phase);

double beatnote_phase_measurement(const BeatnoteSetup& setup, double true_phase, double sigma, std::uint64_t seed);

/// Excited fraction of a Ramsey probe, 0.5 (1 - cos dphi).
double ramsey_probability(double delta_phi);
double ramsey_phase_probe(double delta_phi, std::uint64_t shots, std::uint64_t seed);

struct NoisePresets {
  DriftProcess drift = DriftProcess::enclosed();
  AomModel aom = default_aom_model();
  BeatnoteSetup beatnote;
};

/// JSON preset file. Keys carry their unit as suffix; unknown keys are
/// rejected. Missing keys keep their defaults.
NoisePresets parse_noise_presets(const std::string& json_text);
std::string dump_noise_presets(const NoisePresets& presets);
NoisePresets load_noise_presets(const std::string& path);
void save_noise_presets(const NoisePresets& presets, const std::string& path);

}  // namespace xtalk
