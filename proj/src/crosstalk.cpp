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

#include "xtalk/crosstalk.hpp"

#include <cmath>
#include <string>

namespace xtalk {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_positive(double phase) {
  double r = std::fmod(phase, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}
}  // namespace

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::Conflict: return "conflict";
    case ErrorKind::LowSignal: return "low-signal";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::FitFailure: return "fit-failure";
    case ErrorKind::DegenerateFit: return "degenerate-fit";
    case ErrorKind::Range: return "range";
  }
  return "unknown";
}

CompensationSetting::CompensationSetting(double f_comp, double delta_phi) {
  if (!std::isfinite(f_comp) || f_comp < 0.0)
    fail(ErrorKind::InvalidArgument, "compensation amplitude must be finite and >= 0");
  if (!std::isfinite(delta_phi)) fail(ErrorKind::InvalidArgument, "compensation phase must be finite");
  f_comp_ = f_comp;
  delta_phi_ = wrap_positive(delta_phi);
}

double CompensationSetting::phase_error() const noexcept {
  double e = delta_phi_ - std::numbers::pi;
  return e <= -std::numbers::pi ? e + kTwoPi : e;
}

void CrosstalkContext::validate() const {
  if (!(omega0 > 0.0) || !std::isfinite(omega0))
    fail(ErrorKind::InvalidArgument, "omega0 must be positive");
  if (!(f_ct >= 0.0) || !std::isfinite(f_ct)) fail(ErrorKind::InvalidArgument, "f_ct must be >= 0");
  if (!std::isfinite(delta_ct) || !std::isfinite(stark_shift))
    fail(ErrorKind::InvalidArgument, "detunings must be finite");
  if (!(pol_overlap >= 0.0 && pol_overlap <= 1.0))
    fail(ErrorKind::InvalidArgument, "pol_overlap must lie in [0, 1]");
  if (!(compensation_gain >= 0.0) || !std::isfinite(compensation_gain) ||
      !std::isfinite(compensation_phase_offset))
    fail(ErrorKind::InvalidArgument, "compensation gain/offset must be finite, gain >= 0");
}

CompensationSetting realized_setting(const CrosstalkContext& ctx, const CompensationSetting& programmed) {
  return {ctx.compensation_gain * programmed.f_comp(),
          programmed.delta_phi() + ctx.compensation_phase_offset};
}

ComplexAmplitude effective_rabi(ComplexAmplitude crosstalk, ComplexAmplitude compensation) {
  return crosstalk + compensation;
}

double effective_magnitude(double f_comp, double delta_phi) {
  return effective_magnitude(f_comp, delta_phi, 1.0);
}

double effective_magnitude(double f_comp, double delta_phi, double pol_overlap) {
  if (f_comp < 0.0) fail(ErrorKind::InvalidArgument, "f_comp must be >= 0");
  // |1 + f e^{i dphi}| evaluated as a complex modulus keeps full relative
  // precision near the cancellation point, where the expanded form loses it.
  if (pol_overlap == 1.0) return std::abs(1.0 + std::polar(f_comp, delta_phi));
  const double sq = 1.0 + f_comp * f_comp + 2.0 * pol_overlap * f_comp * std::cos(delta_phi);
  return std::sqrt(std::max(sq, 0.0));
}

bool is_suppressing(double f_comp, double delta_phi) {
  return effective_magnitude(f_comp, delta_phi) < 1.0;
}

double pi_pulse_error(int pulses, double f_eff) {
  if (pulses < 1) fail(ErrorKind::InvalidArgument, "pi_pulse_error: N must be >= 1");
  const double s = std::sin(std::numbers::pi * pulses * f_eff / 2.0);
  return s * s;
}

double pi_pulse_error(int pulses, double f_ct, double f_comp, double delta_phi) {
  return pi_pulse_error(pulses, f_ct * effective_magnitude(f_comp, delta_phi));
}

double relative_error(double f_comp, double delta_phi) {
  const double m = effective_magnitude(f_comp, delta_phi);
  return m * m;
}

double phase_tolerance(double target_relative_error) {
  if (!(target_relative_error > 0.0)) fail(ErrorKind::InvalidArgument, "target must be > 0");
  if (target_relative_error >= 4.0) return std::numbers::pi;
  return 2.0 * std::asin(std::sqrt(target_relative_error) / 2.0);
}

double amplitude_tolerance(double target_relative_error) {
  if (!(target_relative_error > 0.0)) fail(ErrorKind::InvalidArgument, "target must be > 0");
  return std::sqrt(target_relative_error);
}

double break_even_half_width(double f_comp) {
  if (f_comp < 0.0) fail(ErrorKind::InvalidArgument, "f_comp must be >= 0");
  if (f_comp == 0.0 || f_comp >= 2.0) return 0.0;
  // cos dphi < -f/2  <=>  |dphi - pi| < pi - acos(-f/2) = acos(f/2)
  return std::acos(f_comp / 2.0);
}

ComplexAmplitude combine_fields(ComplexAmplitude own, ComplexAmplitude leak, double pol_overlap) {
  if (pol_overlap >= 1.0) return own + leak;
  const ComplexAmplitude coherent = own + pol_overlap * leak;
  const double orthogonal_sq = (1.0 - pol_overlap * pol_overlap) * std::norm(leak);
  const double magnitude = std::sqrt(std::norm(coherent) + orthogonal_sq);
  const double phase = std::abs(coherent) > 0.0 ? std::arg(coherent) : std::arg(leak);
  return std::polar(magnitude, phase);
}

}  // namespace xtalk
