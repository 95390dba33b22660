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

// Addressing pulse sequences applied jointly to a target site and its
// spectator neighbour.
//
// Channel 0 is the target, channel 1 the spectator. Each channel's own drive
// leaks onto the other at the crosstalk ratio f_ct, inheriting the axis
// phase exactly. The target drive tracks the target's Stark-shifted
// resonance, so its segments normally carry zero detuning; the spectator sees
// the extra detuning delta_ct. Final states are reported in each qubit's own
// rotating frame.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "xtalk/crosstalk.hpp"
#include "xtalk/dynamics.hpp"
#include "xtalk/random.hpp"

namespace xtalk {

inline constexpr int kTargetChannel = 0;
inline constexpr int kSpectatorChannel = 1;

struct ChannelPulse {
  int channel = kTargetChannel;
  std::vector<PulseSegment> segments;

  double duration() const;
  bool driven() const;
};

struct PulseSequence {
  std::vector<ChannelPulse> channels;
  std::uint64_t seed = 0;
  std::uint64_t shots = 0;

  const ChannelPulse* find(int channel) const;
  ChannelPulse* find(int channel);
  double duration() const;
};

/// Square rotation by `angle` at axis `phase`, duration angle / omega0.
PulseSequence square_pulse(double omega0, double angle, double phase);
PulseSequence square_pi(double omega0, double phase);

/// arccos(-theta / (4 pi)).
double sk1_correction_phase(double theta);

/// R_{phi-phi1}(2 pi) R_{phi+phi1}(2 pi) R_phi(theta).
PulseSequence sk1(double theta, double phase, double omega0);

/// R_Y(pi/2) R_{-X}(pi/2) R_{-Y}(pi/2) R_X(pi/2) at nominal amplitude.
PulseSequence quadrilateral(double omega0);

/// Residual Z angle of the target after one quadrilateral at nominal
/// amplitude, arg U00 - arg U11. Applying it as a frame update leaves R_X(pi/2).
double quadrilateral_frame_phase(double omega0);

/// Two quadrilaterals, each followed by its target frame update: a pi pulse.
PulseSequence quadrilateral_pi(double omega0);

/// Software Z rotation on one channel, zero duration.
PulseSequence frame_update(int channel, double angle);

/// `first` then `second`; shorter channels of `first` are padded so that
/// `second` starts simultaneously on every channel.
PulseSequence concatenate(const PulseSequence& first, const PulseSequence& second);
PulseSequence repeat(const PulseSequence& sequence, int times);

/// Multiplies every drive amplitude on `channel` by `factor`.
PulseSequence scale_amplitude(PulseSequence sequence, int channel, double factor);

/// Adds the cancellation tone on the spectator channel, segment by segment
/// aligned with the target: amplitude f_comp * f_ct times the target segment,
/// phase offset delta_phi. Throws conflict if the spectator is already driven.
PulseSequence with_pcc(const PulseSequence& sequence, const CrosstalkContext& ctx,
                       const CompensationSetting& setting);

/// Splits and pads channels so that all share identical segment boundaries.
PulseSequence normalize(const PulseSequence& sequence);

/// Propagator of one channel in isolation (no crosstalk), own qubit frame.
Unitary2 channel_unitary(const ChannelPulse& channel, double amplitude_scale = 1.0, double extra_detuning = 0.0);

/// Per-shot noise injection. `compensation_phase` returns an extra phase (rad)
/// on the spectator's own drive for one shot.
struct NoiseHooks {
  std::function<double(std::uint64_t shot, Rng& rng)> compensation_phase;
};

struct SimulationResult {
  std::vector<int> channels;
  std::vector<Unitary2> unitaries;
  std::vector<QubitState> final_states;
  std::vector<double> excited_population;
  /// Shot-sampled excited fraction per channel; empty without shots.
  std::vector<double> sampled_population;
};

/// Evolves every channel. `initial` holds one state per channel in the order
/// of `sequence.channels`. Sampling uses the stream (sequence.seed,
/// point_index) so results do not depend on evaluation order.
SimulationResult simulate(const PulseSequence& sequence, const CrosstalkContext& ctx,
                          const std::vector<QubitState>& initial, const NoiseHooks& hooks = {},
                          std::uint64_t point_index = 0);

}  // namespace xtalk
