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

// Closed-loop calibration of the cancellation tone against the simulator.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "xtalk/crosstalk.hpp"
#include "xtalk/error.hpp"
#include "xtalk/least_squares.hpp"

namespace xtalk {

struct CalibrationResult {
  double t_pi_ct = 0.0;         // s
  double f_comp_star = 0.0;
  double delta_phi_star = 0.0;  // rad, [0, 2 pi)
  double delta_ct_star = 0.0;   // rad/s
  double residual = 0.0;        // rms of the phase fit
  // Best relative magnitude reachable with the given polarization overlap.
  double residual_floor = 0.0;
  double timestamp = 0.0;       // s since the Unix epoch
};

struct FlopScan {
  int points_per_period = 20;
  int periods = 2;
};

struct PiTimeMeasurement {
  double t_pi = 0.0;
  double contrast = 0.0;
  double offset = 0.0;
  FitDiagnostics fit;
};

/// Spectator Rabi flop under the bare target drive, fitted with
/// c + a sin^2(w t / 2). The scan spans `periods` flops of the nominal
/// crosstalk ratio. `shots == 0` evaluates exact populations.
PiTimeMeasurement measure_pi_time(const CrosstalkContext& ctx, std::uint64_t shots, std::uint64_t seed,
                                  const FlopScan& scan = {});

struct AmplitudeCalibration {
  double f_comp_star = 0.0;
  double residual_floor = 0.0;
  int evaluations = 0;
};

/// Bisection on the programmed tone amplitude in [lo, hi] until the
/// tone-only spectator pi time equals t_pi_ct.
AmplitudeCalibration calibrate_amplitude(const CrosstalkContext& ctx, double t_pi_ct, std::uint64_t shots,
                                         std::uint64_t seed, double lo = 0.2, double hi = 5.0,
                                         double tolerance = 1e-7);

struct PhaseCalibration {
  double delta_phi_star = 0.0;
  double magnitude = 0.0;  // fitted realized amplitude ratio
  double rms = 0.0;
  std::vector<double> scan_phase;
  std::vector<double> scan_population;
  FitDiagnostics fit;
};

/// Population model of a phase scan at t = 2 n t_pi_ct:
/// sin^2(n pi sqrt(1 + F^2 - 2 F cos(dphi - phi_star))).
double phase_scan_model(double delta_phi, double phi_star, double magnitude, int periods);

/// Scans dphi over [0, 2 pi) with both pulses on and fits phase_scan_model.
PhaseCalibration calibrate_phase(const CrosstalkContext& ctx, double f_comp, double t_pi_ct, int periods,
                                 std::uint64_t shots, std::uint64_t seed, int points = 40);

struct StarkShiftCalibration {
  double shift = 0.0;     // rad/s, fitted target resonance shift
  double delta_ct = 0.0;  // rad/s, -shift
  FitDiagnostics fit;
};

/// Target pi-pulse lineshape scanned over drive detuning +/- span * omega0.
StarkShiftCalibration calibrate_stark_shift(const CrosstalkContext& ctx, std::uint64_t shots, std::uint64_t seed,
                                            int points = 41, double span = 2.0);

/// Minutes until the phase drifts out of the tolerance for `target`
/// relative error at f_comp = 1.
double recalibration_interval(double drift_rate_rad_per_min, double suppression_target);

enum class FitModelKind { Eq7Population, Sk1Numeric };

/// Parameters are (f_eff, d = delta_ct / omega0, population offset).
struct FitModel {
  FitModelKind kind = FitModelKind::Eq7Population;
  std::array<double, 3> parameters{0.01, 0.0, 0.0};
  std::array<bool, 3> free{true, false, false};
  std::array<double, 3> lower{0.0, -1.0, -0.1};
  std::array<double, 3> upper{0.5, 1.0, 0.1};

  void validate() const;
  /// Spectator excited population after n pulses.
  double evaluate(int pulses, const std::array<double, 3>& p) const;
};

struct CrosstalkFit {
  FitModel model;  // with fitted parameters
  double rms = 0.0;
  Eigen::MatrixXd covariance;  // free parameters only, in order
  FitDiagnostics fit;
};

CrosstalkFit fit_crosstalk_model(const std::vector<std::pair<int, double>>& data, const FitModel& model);

struct ChainOptions {
  std::uint64_t shots = 200;
  std::uint64_t seed = 0;
  int phase_periods = 1;
  int phase_points = 40;
  bool stark = true;
};

struct CalibrationReport {
  CalibrationResult result;
  PiTimeMeasurement pi_time;
  AmplitudeCalibration amplitude;
  PhaseCalibration phase;
  StarkShiftCalibration stark;
};

/// Stark shift, then pi time, amplitude and phase.
CalibrationReport run_calibration_chain(const CrosstalkContext& ctx, const ChainOptions& options);

std::string format_iso8601(double unix_seconds);
std::string calibration_to_json(const CalibrationResult& result);
CalibrationResult calibration_from_json(const std::string& text);
std::string diagnostics_to_json(const CalibrationReport& report);
/// Writes `path` and the diagnostics sidecar `<path stem>.diagnostics.json`.
std::string write_calibration(const CalibrationReport& report, const std::string& path);

}  // namespace xtalk
