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

#include "xtalk/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace xtalk {

namespace {

constexpr double kPi = std::numbers::pi;

PulseSequence target_only(std::vector<PulseSegment> segments) {
  PulseSequence s;
  s.channels.push_back({kTargetChannel, std::move(segments)});
  s.channels.push_back({kSpectatorChannel, {}});
  return s;
}

PulseSegment drive_segment(double omega0, double angle, double phase) {
  PulseSegment seg;
  seg.rabi = omega0;
  seg.phase = phase;
  seg.duration = angle / omega0;
  return seg;
}

void check_omega(double omega0) {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) fail(ErrorKind::InvalidArgument, "omega0 must be positive");
}

std::vector<const ChannelPulse*> sorted_channels(const PulseSequence& sequence) {
  std::vector<const ChannelPulse*> out;
  for (const auto& c : sequence.channels) out.push_back(&c);
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->channel < b->channel; });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i]->channel == out[i - 1]->channel) fail(ErrorKind::InvalidArgument, "duplicate channel id");
  return out;
}

}  // namespace

double ChannelPulse::duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

bool ChannelPulse::driven() const {
  return std::any_of(segments.begin(), segments.end(),
                     [](const PulseSegment& s) { return std::abs(s.rabi) > 0.0 && s.duration > 0.0; });
}

const ChannelPulse* PulseSequence::find(int channel) const {
  for (const auto& c : channels)
    if (c.channel == channel) return &c;
  return nullptr;
}

ChannelPulse* PulseSequence::find(int channel) {
  for (auto& c : channels)
    if (c.channel == channel) return &c;
  return nullptr;
}

double PulseSequence::duration() const {
  double t = 0.0;
  for (const auto& c : channels) t = std::max(t, c.duration());
  return t;
}

PulseSequence square_pulse(double omega0, double angle, double phase) {
  check_omega(omega0);
  if (!(angle >= 0.0)) fail(ErrorKind::InvalidArgument, "rotation angle must be >= 0");
  return target_only({drive_segment(omega0, angle, phase)});
}

PulseSequence square_pi(double omega0, double phase) { return square_pulse(omega0, kPi, phase); }

double sk1_correction_phase(double theta) { return std::acos(-theta / (4.0 * kPi)); }

PulseSequence sk1(double theta, double phase, double omega0) {
  check_omega(omega0);
  if (!(theta > 0.0 && theta <= kPi)) fail(ErrorKind::InvalidArgument, "sk1: theta must lie in (0, pi]");
  const double phi1 = sk1_correction_phase(theta);
  return target_only({drive_segment(omega0, theta, phase), drive_segment(omega0, 2.0 * kPi, phase + phi1),
                      drive_segment(omega0, 2.0 * kPi, phase - phi1)});
}

PulseSequence quadrilateral(double omega0) {
  check_omega(omega0);
  const double quarter = kPi / 2.0;
  // Application order R_X, R_{-Y}, R_{-X}, R_Y.
  return target_only({drive_segment(omega0, quarter, 0.0), drive_segment(omega0, quarter, -quarter),
                      drive_segment(omega0, quarter, kPi), drive_segment(omega0, quarter, quarter)});
}

double quadrilateral_frame_phase(double omega0) {
  return residual_frame_phase(channel_unitary(quadrilateral(omega0).channels.front()));
}

PulseSequence quadrilateral_pi(double omega0) {
  const auto half = concatenate(quadrilateral(omega0), frame_update(kTargetChannel, quadrilateral_frame_phase(omega0)));
  return repeat(half, 2);
}

PulseSequence frame_update(int channel, double angle) {
  PulseSegment seg;
  seg.frame_z = angle;
  PulseSequence s;
  s.channels.push_back({channel, {seg}});
  return s;
}

PulseSequence concatenate(const PulseSequence& first, const PulseSequence& second) {
  PulseSequence out;
  out.seed = first.seed;
  out.shots = first.shots;
  const double t_first = first.duration();
  std::vector<int> ids;
  for (const auto& c : first.channels) ids.push_back(c.channel);
  for (const auto& c : second.channels) ids.push_back(c.channel);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (int id : ids) {
    ChannelPulse c{id, {}};
    if (const auto* a = first.find(id)) c.segments = a->segments;
    const double pad = t_first - c.duration();
    if (pad > 0.0) {
      PulseSegment idle;
      idle.duration = pad;
      c.segments.push_back(idle);
    }
    if (const auto* b = second.find(id)) c.segments.insert(c.segments.end(), b->segments.begin(), b->segments.end());
    out.channels.push_back(std::move(c));
  }
  return out;
}

PulseSequence repeat(const PulseSequence& sequence, int times) {
  if (times < 0) fail(ErrorKind::InvalidArgument, "repeat count must be >= 0");
  PulseSequence out;
  for (const auto& c : sequence.channels) out.channels.push_back({c.channel, {}});
  out.seed = sequence.seed;
  out.shots = sequence.shots;
  for (int i = 0; i < times; ++i) out = concatenate(out, sequence);
  out.seed = sequence.seed;
  out.shots = sequence.shots;
  return out;
}

PulseSequence scale_amplitude(PulseSequence sequence, int channel, double factor) {
  if (!std::isfinite(factor) || factor < 0.0) fail(ErrorKind::InvalidArgument, "amplitude scale must be >= 0");
  if (auto* c = sequence.find(channel))
    for (auto& s : c->segments) s.rabi *= factor;
  return sequence;
}

PulseSequence with_pcc(const PulseSequence& sequence, const CrosstalkContext& ctx,
                       const CompensationSetting& setting) {
  ctx.validate();
  const auto* target = sequence.find(kTargetChannel);
  if (!target) fail(ErrorKind::InvalidArgument, "with_pcc: sequence has no target channel");
  PulseSequence out = sequence;
  auto* spectator = out.find(kSpectatorChannel);
  if (spectator && spectator->driven())
    fail(ErrorKind::Conflict, "with_pcc: spectator channel is already driven");
  if (!spectator) {
    out.channels.push_back({kSpectatorChannel, {}});
    spectator = &out.channels.back();
  }
  const auto tone = std::polar(setting.f_comp() * ctx.f_ct, setting.delta_phi());
  std::vector<PulseSegment> segments;
  for (const auto& t : target->segments) {
    PulseSegment s;
    s.rabi = t.rabi * tone;
    s.phase = t.phase;
    s.detuning = t.detuning;
    s.duration = t.duration;
    segments.push_back(s);
  }
  // Keep any frame updates already scheduled on the spectator at the end.
  std::vector<PulseSegment> frames;
  for (const auto& s : spectator->segments)
    if (s.frame_z != 0.0) {
      PulseSegment f;
      f.frame_z = s.frame_z;
      frames.push_back(f);
    }
  spectator->segments = std::move(segments);
  spectator->segments.insert(spectator->segments.end(), frames.begin(), frames.end());
  return out;
}

PulseSequence normalize(const PulseSequence& sequence) {
  const auto channels = sorted_channels(sequence);
  PulseSequence out;
  out.seed = sequence.seed;
  out.shots = sequence.shots;
  for (const auto* c : channels) out.channels.push_back({c->channel, {}});
  const std::size_t n = channels.size();
  if (n == 0) return out;

  for (const auto* c : channels)
    for (const auto& s : c->segments)
      if (!(s.duration >= 0.0) || !std::isfinite(s.duration))
        fail(ErrorKind::InvalidArgument, "segment durations must be finite and >= 0");

  const double tol = 1e-12 * std::max(sequence.duration(), 1e-300);
  std::vector<std::size_t> index(n, 0);
  std::vector<double> remaining(n, 0.0);
  std::vector<bool> started(n, false);
  auto live = [&](std::size_t c) { return index[c] < channels[c]->segments.size(); };
  auto current = [&](std::size_t c) -> const PulseSegment& { return channels[c]->segments[index[c]]; };

  while (true) {
    bool zero = false;
    for (std::size_t c = 0; c < n && !zero; ++c) {
      if (live(c) && !started[c] && current(c).duration == 0.0) {
        for (std::size_t o = 0; o < n; ++o) {
          PulseSegment seg;
          if (o == c) seg = current(c);
          out.channels[o].segments.push_back(seg);
        }
        ++index[c];
        zero = true;
      }
    }
    if (zero) continue;

    double dt = -1.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!live(c)) continue;
      if (!started[c]) {
        remaining[c] = current(c).duration;
        started[c] = true;
      }
      dt = dt < 0.0 ? remaining[c] : std::min(dt, remaining[c]);
    }
    if (dt < 0.0) break;

    for (std::size_t c = 0; c < n; ++c) {
      PulseSegment seg;
      seg.duration = dt;
      if (live(c)) {
        const PulseSegment& cur = current(c);
        seg.rabi = cur.rabi;
        seg.phase = cur.phase;
        seg.detuning = cur.detuning;
        remaining[c] -= dt;
        if (remaining[c] <= tol) {
          seg.frame_z = cur.frame_z;
          ++index[c];
          started[c] = false;
        }
      }
      out.channels[c].segments.push_back(seg);
    }
  }
  return out;
}

Unitary2 channel_unitary(const ChannelPulse& channel, double amplitude_scale, double extra_detuning) {
  Unitary2 u = Unitary2::Identity();
  double free_phase = 0.0;
  for (const auto& s : channel.segments) {
    const double detuning = s.detuning + extra_detuning;
    u = rotation_unitary(s.drive() * amplitude_scale, detuning, s.duration) * u;
    free_phase += detuning * s.duration;
    if (s.frame_z != 0.0) u = z_rotation(s.frame_z) * u;
  }
  return z_rotation(-free_phase) * u;
}

SimulationResult simulate(const PulseSequence& sequence, const CrosstalkContext& ctx,
                          const std::vector<QubitState>& initial, const NoiseHooks& hooks,
                          std::uint64_t point_index) {
  ctx.validate();
  if (initial.size() != sequence.channels.size())
    fail(ErrorKind::InvalidArgument, "simulate: one initial state per channel is required");
  for (const auto& c : sequence.channels)
    if (c.channel != kTargetChannel && c.channel != kSpectatorChannel)
      fail(ErrorKind::InvalidArgument, "simulate: only target (0) and spectator (1) channels are supported");

  const PulseSequence norm = normalize(sequence);
  const ChannelPulse* target = norm.find(kTargetChannel);
  const ChannelPulse* spectator = norm.find(kSpectatorChannel);
  const std::size_t slices = norm.channels.front().segments.size();
  const ComplexAmplitude gain = std::polar(ctx.compensation_gain, ctx.compensation_phase_offset);

  auto evolve = [&](double spectator_phase_noise) {
    Unitary2 ut = Unitary2::Identity();
    Unitary2 us = Unitary2::Identity();
    double free_t = 0.0;
    double free_s = 0.0;
    const ComplexAmplitude noise = std::polar(1.0, spectator_phase_noise);
    for (std::size_t k = 0; k < slices; ++k) {
      const PulseSegment* st = target ? &target->segments[k] : nullptr;
      const PulseSegment* ss = spectator ? &spectator->segments[k] : nullptr;
      const double dt = st ? st->duration : ss->duration;
      const ComplexAmplitude own_t = st ? st->drive() : ComplexAmplitude{};
      const ComplexAmplitude own_s = ss ? ss->drive() * gain * noise : ComplexAmplitude{};
      const bool t_on = std::abs(own_t) > 0.0;
      const bool s_on = std::abs(own_s) > 0.0;
      const double det_own_t = st ? st->detuning : 0.0;
      const double det_own_s = ss ? ss->detuning : 0.0;

      if (st) {
        const double det = (t_on || !s_on) ? det_own_t : det_own_s;
        ut = rotation_unitary(combine_fields(own_t, ctx.f_ct * own_s, ctx.pol_overlap), det, dt) * ut;
        free_t += det * dt;
        if (st->frame_z != 0.0) ut = z_rotation(st->frame_z) * ut;
      }
      if (ss) {
        const double det = ctx.delta_ct + ((s_on || !t_on) ? det_own_s : det_own_t);
        us = rotation_unitary(combine_fields(own_s, ctx.f_ct * own_t, ctx.pol_overlap), det, dt) * us;
        free_s += det * dt;
        if (ss->frame_z != 0.0) us = z_rotation(ss->frame_z) * us;
      }
    }
    ut = z_rotation(-free_t) * ut;
    us = z_rotation(-free_s) * us;
    return std::pair{ut, us};
  };

  // Results are reported in the caller's channel order.
  SimulationResult result;
  auto [ut, us] = evolve(0.0);
  for (std::size_t i = 0; i < sequence.channels.size(); ++i) {
    const int id = sequence.channels[i].channel;
    const Unitary2& u = id == kTargetChannel ? ut : us;
    result.channels.push_back(id);
    result.unitaries.push_back(u);
    result.final_states.push_back(xtalk::apply(u, initial[i]));
    result.excited_population.push_back(excited_population(result.final_states.back()));
  }

  if (sequence.shots > 0) {
    Rng rng = make_rng(sequence.seed, point_index);
    if (!hooks.compensation_phase) {
      for (double p : result.excited_population) result.sampled_population.push_back(sample_fraction(p, sequence.shots, rng));
    } else {
      std::vector<std::uint64_t> counts(sequence.channels.size(), 0);
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      for (std::uint64_t shot = 0; shot < sequence.shots; ++shot) {
        const double eta = hooks.compensation_phase(shot, rng);
        auto [vt, vs] = evolve(eta);
        for (std::size_t i = 0; i < sequence.channels.size(); ++i) {
          const Unitary2& u = sequence.channels[i].channel == kTargetChannel ? vt : vs;
          if (uniform(rng) < excited_population(QubitState(u * initial[i]))) ++counts[i];
        }
      }
      for (auto c : counts) result.sampled_population.push_back(static_cast<double>(c) / sequence.shots);
    }
  }
  return result;
}

}  // namespace xtalk
