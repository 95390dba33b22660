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

// Coherent field algebra of crosstalk plus a cancellation tone.

#include <complex>
#include <numbers>

#include "xtalk/dynamics.hpp"

namespace xtalk {

/// Relative amplitude and phase of the cancellation tone with respect to the
/// crosstalk field. The phase is stored in [0, 2 pi).
class CompensationSetting {
 public:
  CompensationSetting() = default;
  CompensationSetting(double f_comp, double delta_phi);

  double f_comp() const noexcept { return f_comp_; }
  double delta_phi() const noexcept { return delta_phi_; }
  /// Offset from the ideal cancellation phase pi, in (-pi, pi].
  double phase_error() const noexcept;

 private:
  double f_comp_ = 0.0;
  double delta_phi_ = 0.0;
};

/// Physics of one target/spectator pair.
///
/// `compensation_gain` and `compensation_phase_offset` model the unknown map
/// from a programmed CompensationSetting to the field that actually reaches
/// the spectator; calibration has to discover them.
struct CrosstalkContext {
  double omega0 = 2.0 * std::numbers::pi * 50e3;  // rad/s
  double f_ct = 0.096;
  double delta_ct = 0.0;     // rad/s
  double pol_overlap = 1.0;  // [0, 1]
  double stark_shift = 0.0;  // rad/s, target resonance shift under drive
  double compensation_gain = 1.0;
  double compensation_phase_offset = 0.0;  // rad

  void validate() const;
};

/// Setting as realized at the ion: gain and phase offset applied.
CompensationSetting realized_setting(const CrosstalkContext& ctx, const CompensationSetting& programmed);

ComplexAmplitude effective_rabi(ComplexAmplitude crosstalk, ComplexAmplitude compensation);

/// |1 + f e^{i dphi}|.
double effective_magnitude(double f_comp, double delta_phi);

/// Effective magnitude when only a fraction `pol_overlap` of the fields
/// interferes: sqrt(1 + f^2 + 2 p f cos dphi).
double effective_magnitude(double f_comp, double delta_phi, double pol_overlap);

/// Strict improvement over no compensation: cos dphi < -f_comp / 2.
bool is_suppressing(double f_comp, double delta_phi);

/// sin^2(pi N f_eff / 2).
double pi_pulse_error(int pulses, double f_eff);
double pi_pulse_error(int pulses, double f_ct, double f_comp, double delta_phi);

/// Compensated over uncompensated error in the weak-crosstalk limit,
/// 1 + f^2 + 2 f cos dphi.
double relative_error(double f_comp, double delta_phi);

/// Largest |dphi - pi| (f_comp = 1) that keeps relative_error <= target.
double phase_tolerance(double target_relative_error);

/// Largest |f_comp - 1| (dphi = pi) that keeps relative_error <= target.
double amplitude_tolerance(double target_relative_error);

/// Half-width of the suppressing phase window around pi for a given f_comp,
/// or 0 when no phase suppresses (f_comp >= 2).
double break_even_half_width(double f_comp);

/// Drive seen by a site whose own field `own` overlaps a leaked field `leak`.
/// The overlapping part adds coherently; the orthogonal part adds in
/// quadrature, so |result|^2 = |own|^2 + |leak|^2 + 2 p Re(own* leak).
ComplexAmplitude combine_fields(ComplexAmplitude own, ComplexAmplitude leak, double pol_overlap);

}  // namespace xtalk
