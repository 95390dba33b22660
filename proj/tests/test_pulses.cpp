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

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles/oracles.hpp"
#include "xtalk/error.hpp"
#include "xtalk/pulses.hpp"

using namespace xtalk;
using std::numbers::pi;

namespace {

constexpr double kOmega0 = 2 * pi * 50e3;

CrosstalkContext context(double f_ct, double delta = 0.0) {
  CrosstalkContext ctx;
  ctx.f_ct = f_ct;
  ctx.delta_ct = delta;
  return ctx;
}

SimulationResult run(const PulseSequence& seq, const CrosstalkContext& ctx) {
  return simulate(seq, ctx, std::vector<QubitState>(seq.channels.size(), ket0()));
}

double target_population(const PulseSequence& seq, double scale) {
  const QubitState psi = channel_unitary(*seq.find(kTargetChannel), scale) * ket0();
  return excited_population(psi);
}

// Excited population after hand-multiplied X/Y rotations.
double oracle_population(const std::vector<std::pair<double, double>>& angle_phase) {
  oracle::Mat2 u{1.0, 0.0, 0.0, 1.0};
  for (auto [angle, phase] : angle_phase) u = oracle::mul(oracle::axis_rotation(angle, phase), u);
  return std::norm(u.c);
}

}  // namespace

TEST_CASE("square pi pulse on target and spectator") {
  const auto r = run(square_pi(kOmega0, 0.0), context(0.096));
  CHECK(r.excited_population[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.excited_population[1] == doctest::Approx(std::pow(std::sin(0.048 * pi), 2)).epsilon(1e-12));
  CHECK(std::abs(r.excited_population[1] - 2.26e-2) < 5e-5);
  const auto twice = run(repeat(square_pi(kOmega0, 0.3), 2), context(0.0));
  CHECK(gate_fidelity(twice.unitaries[0], Unitary2(Unitary2::Identity())) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(square_pi(0.0, 0.0), Error);
}

TEST_CASE("sk1 is exact at nominal amplitude") {
  for (double phase : {0.0, 0.4, pi / 2}) {
    const auto seq = sk1(pi, phase, kOmega0);
    CHECK(seq.find(kTargetChannel)->segments.size() == 3);
    const Unitary2 u = channel_unitary(*seq.find(kTargetChannel));
    CHECK(gate_fidelity(u, axis_rotation(pi, phase)) >= 1.0 - 1e-9);
  }
  CHECK(sk1_correction_phase(pi) == doctest::Approx(std::acos(-0.25)));
  CHECK_THROWS_AS(sk1(0.0, 0.0, kOmega0), Error);
  CHECK_THROWS_AS(sk1(4.0, 0.0, kOmega0), Error);
}

TEST_CASE("sk1 amplitude response is flat at nominal") {
  const auto seq = sk1(pi, 0.0, kOmega0);
  const double h = 1e-4;
  const double slope = (target_population(seq, 1 + h) - target_population(seq, 1 - h)) / (2 * h);
  CHECK(std::abs(slope) <= 1e-6);
  const double phi1 = std::acos(-0.25);
  for (double eps : {0.9, 0.95, 1.05, 1.1}) {
    const double ref = oracle_population({{eps * pi, 0.0}, {eps * 2 * pi, phi1}, {eps * 2 * pi, -phi1}});
    CHECK(target_population(seq, eps) == doctest::Approx(ref).epsilon(1e-12));
    const double square_error = 1.0 - target_population(square_pi(kOmega0, 0.0), eps);
    CHECK(1.0 - ref <= square_error);
  }
}

TEST_CASE("sk1 spectator error per pi pulse is of order 1e-4") {
  const auto r = run(sk1(pi, 0.0, kOmega0), context(0.096));
  const double phi1 = std::acos(-0.25);
  const double f = 0.096;
  const double ref = oracle_population({{f * pi, 0.0}, {f * 2 * pi, phi1}, {f * 2 * pi, -phi1}});
  CHECK(r.excited_population[1] == doctest::Approx(ref).epsilon(1e-10));
  CHECK(r.excited_population[1] > 1.3e-5);
  CHECK(r.excited_population[1] < 1.3e-3);
}

TEST_CASE("quadrilateral structure and limits") {
  const auto q = quadrilateral(kOmega0);
  const auto& segs = q.find(kTargetChannel)->segments;
  REQUIRE(segs.size() == 4);
  const double phases[] = {0.0, -pi / 2, pi, pi / 2};
  for (int i = 0; i < 4; ++i) {
    CHECK(segs[i].phase == doctest::Approx(phases[i]));
    CHECK(segs[i].duration * kOmega0 == doctest::Approx(pi / 2));
  }
  CHECK((channel_unitary(*q.find(kTargetChannel), 0.0) - Unitary2::Identity()).cwiseAbs().maxCoeff() <= 1e-9);
  const Unitary2 nominal = channel_unitary(*q.find(kTargetChannel));
  const double gamma = quadrilateral_frame_phase(kOmega0);
  CHECK(gate_fidelity(Unitary2(z_rotation(gamma) * nominal), axis_rotation(pi / 2, 0.0)) >= 1 - 1e-12);
  CHECK(gamma == doctest::Approx(-pi / 2));
}

TEST_CASE("quadrilateral pi pulse transfers the target with frame updates") {
  const auto r = run(quadrilateral_pi(kOmega0), context(0.0));
  CHECK(r.excited_population[0] == doctest::Approx(1.0).epsilon(1e-12));
  // Without the frame update the two halves do not add up.
  const auto bare = run(repeat(quadrilateral(kOmega0), 2), context(0.0));
  CHECK(bare.excited_population[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("quadrilateral spectator leakage is high order in the crosstalk") {
  std::vector<double> eps, lib, ref;
  for (int i = 0; i < 8; ++i) {
    const double e = 3e-3 * std::pow(10.0, i / 7.0);
    eps.push_back(e);
    const auto r = run(quadrilateral_pi(kOmega0), context(e));
    lib.push_back(r.excited_population[1]);
    const double a = e * pi / 2;
    const std::vector<std::pair<double, double>> one{{a, 0.0}, {a, -pi / 2}, {a, pi}, {a, pi / 2}};
    auto two = one;
    two.insert(two.end(), one.begin(), one.end());
    ref.push_back(oracle_population(two));
    CHECK(std::abs(lib.back() - ref.back()) <= 1e-14 + 1e-9 * ref.back());
  }
  CHECK(oracle::slope_loglog(eps, ref) >= 3.5);
  CHECK(oracle::slope_loglog(eps, lib) >= 3.5);
}

TEST_CASE("pcc cancels the crosstalk") {
  const auto ctx = context(0.096);
  const auto r = run(with_pcc(square_pi(kOmega0, 0.0), ctx, CompensationSetting(1.0, pi)), ctx);
  CHECK(r.excited_population[1] <= 1e-12);
  CHECK(r.excited_population[0] == doctest::Approx(1.0).epsilon(1e-3));

  // A 1/40 residual slows the spectator flop forty-fold.
  const double t_ct = pi / (0.096 * kOmega0);
  const auto slow = CompensationSetting(1.0 - 1.0 / 40.0, pi);
  const auto long_pulse = with_pcc(square_pulse(kOmega0, kOmega0 * 40 * t_ct, 0.0), ctx, slow);
  CHECK(run(long_pulse, ctx).excited_population[1] == doctest::Approx(1.0).epsilon(1e-9));
  const auto short_pulse = with_pcc(square_pulse(kOmega0, kOmega0 * t_ct, 0.0), ctx, slow);
  CHECK(run(short_pulse, ctx).excited_population[1] == doctest::Approx(std::pow(std::sin(pi / 80), 2)).epsilon(1e-9));

  // In phase the spectator flops twice as fast.
  const auto fast = with_pcc(square_pulse(kOmega0, kOmega0 * t_ct / 2, 0.0), ctx, CompensationSetting(1.0, 0.0));
  CHECK(run(fast, ctx).excited_population[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pcc cancellation holds for arbitrary sequences") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto ctx = context(0.1);
  for (int trial = 0; trial < 50; ++trial) {
    PulseSequence seq;
    std::vector<PulseSegment> segs;
    for (int i = 0; i < 5; ++i) {
      PulseSegment s;
      s.rabi = kOmega0 * (0.2 + u(rng));
      s.phase = 2 * pi * u(rng);
      s.duration = u(rng) * 20e-6;
      segs.push_back(s);
    }
    seq.channels.push_back({kTargetChannel, segs});
    seq.channels.push_back({kSpectatorChannel, {}});
    const auto r = run(with_pcc(seq, ctx, CompensationSetting(1.0, pi)), ctx);
    CHECK(r.excited_population[1] <= 1e-20);
  }
}

TEST_CASE("pcc refuses a driven spectator") {
  const auto ctx = context(0.1);
  const auto once = with_pcc(square_pi(kOmega0, 0.0), ctx, CompensationSetting(1.0, pi));
  try {
    with_pcc(once, ctx, CompensationSetting(1.0, pi));
    FAIL("expected a conflict");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Conflict);
  }
}

TEST_CASE("simulate rejects malformed inputs") {
  const auto seq = square_pi(kOmega0, 0.0);
  try {
    simulate(seq, context(0.1), {ket0()});
    FAIL("expected invalid-argument");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
  PulseSequence three = seq;
  three.channels.push_back({7, {}});
  CHECK_THROWS_AS(simulate(three, context(0.1), {ket0(), ket0(), ket0()}), Error);
}

TEST_CASE("zero amplitude leaves every state unchanged") {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> n(0.0, 1.0);
  auto seq = scale_amplitude(scale_amplitude(sk1(pi, 0.2, kOmega0), kTargetChannel, 0.0), kSpectatorChannel, 0.0);
  for (int i = 0; i < 10; ++i) {
    std::vector<QubitState> init;
    for (int c = 0; c < 2; ++c) {
      QubitState psi(ComplexAmplitude(n(rng), n(rng)), ComplexAmplitude(n(rng), n(rng)));
      init.push_back(psi / psi.norm());
    }
    const auto r = simulate(seq, context(0.1, 2 * pi * 3e3), init);
    for (int c = 0; c < 2; ++c) CHECK((r.final_states[c] - init[c]).norm() <= 1e-12);
  }
}

TEST_CASE("cancellation tone leaks back onto the target at second order") {
  const double f_ct = 0.1, f_comp = 1.0;
  const double t = 200e-6;
  PulseSequence seq;
  PulseSegment idle, tone;
  idle.duration = t;
  tone.rabi = f_comp * f_ct * kOmega0;
  tone.duration = t;
  seq.channels.push_back({kTargetChannel, {idle}});
  seq.channels.push_back({kSpectatorChannel, {tone}});
  const auto r = run(seq, context(f_ct));
  const double back_action_rabi = f_ct * f_comp * f_ct * kOmega0;
  CHECK(back_action_rabi / kOmega0 == doctest::Approx(1e-2));
  CHECK(r.excited_population[0] == doctest::Approx(std::pow(std::sin(back_action_rabi * t / 2), 2)).epsilon(1e-12));
}

TEST_CASE("rabi flopping periods of target and spectator") {
  const double f = 0.096;
  const auto ctx = context(f);
  for (int k = 1; k <= 3; ++k) {
    const auto at_target_pi = run(square_pulse(kOmega0, (2 * k - 1) * pi, 0.0), ctx);
    CHECK(at_target_pi.excited_population[0] == doctest::Approx(1.0).epsilon(1e-12));
    const auto at_spectator_pi = run(square_pulse(kOmega0, (2 * k - 1) * pi / f, 0.0), ctx);
    CHECK(at_spectator_pi.excited_population[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("shot sampling converges and is reproducible") {
  auto seq = square_pulse(kOmega0, 3.0, 0.0);
  seq.shots = 100000;
  seq.seed = 99;
  const auto ctx = context(0.3);
  const auto a = simulate(seq, ctx, {ket0(), ket0()}, {}, 5);
  const auto b = simulate(seq, ctx, {ket0(), ket0()}, {}, 5);
  const auto c = simulate(seq, ctx, {ket0(), ket0()}, {}, 6);
  for (int ch = 0; ch < 2; ++ch) {
    const double p = a.excited_population[ch];
    const double sigma = std::sqrt(p * (1 - p) / 1e5);
    CHECK(std::abs(a.sampled_population[ch] - p) <= 5 * sigma);
    CHECK(a.sampled_population[ch] == b.sampled_population[ch]);
  }
  CHECK(a.sampled_population != c.sampled_population);
}

TEST_CASE("per-shot phase noise on the cancellation tone") {
  const auto ctx = context(0.1);
  auto seq = with_pcc(square_pi(kOmega0, 0.0), ctx, CompensationSetting(1.0, pi));
  seq.shots = 20000;
  seq.seed = 4;
  NoiseHooks zero{[](std::uint64_t, Rng&) { return 0.0; }};
  CHECK(simulate(seq, ctx, {ket0(), ket0()}, zero).sampled_population[1] == 0.0);
  const double delta = 0.5;
  NoiseHooks fixed{[&](std::uint64_t, Rng&) { return delta; }};
  const auto r = simulate(seq, ctx, {ket0(), ket0()}, fixed);
  const double p = pi_pulse_error(1, 0.1, 1.0, pi + delta);
  CHECK(std::abs(r.sampled_population[1] - p) <= 5 * std::sqrt(p * (1 - p) / 20000));
}

TEST_CASE("normalization aligns segment boundaries") {
  PulseSequence seq;
  PulseSegment a, b, c;
  a.rabi = 1.0;
  a.duration = 3.0;
  a.frame_z = 0.7;
  b.rabi = 2.0;
  b.duration = 1.0;
  c.rabi = 3.0;
  c.duration = 1.5;
  seq.channels.push_back({kSpectatorChannel, {b, c}});
  seq.channels.push_back({kTargetChannel, {a}});
  const auto n = normalize(seq);
  REQUIRE(n.channels.size() == 2);
  CHECK(n.channels[0].channel == kTargetChannel);
  const auto& t = n.channels[0].segments;
  const auto& s = n.channels[1].segments;
  REQUIRE(t.size() == s.size());
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i].duration == doctest::Approx(s[i].duration));
  CHECK(n.channels[0].duration() == doctest::Approx(3.0));
  CHECK(n.channels[1].duration() == doctest::Approx(3.0));
  double frame = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) frame += t[i].frame_z;
  CHECK(frame == 0.0);
  CHECK(t.back().frame_z == doctest::Approx(0.7));
  // Normalizing does not change the physics.
  const auto ctx = context(0.2);
  const auto r1 = run(seq, ctx);
  const auto r2 = run(n, ctx);
  CHECK(r1.channels[1] == kTargetChannel);
  CHECK(r1.excited_population[1] == doctest::Approx(r2.excited_population[0]).epsilon(1e-12));
  CHECK(r1.excited_population[0] == doctest::Approx(r2.excited_population[1]).epsilon(1e-12));
}

TEST_CASE("concatenate, repeat and scale") {
  const auto p = square_pi(kOmega0, 0.0);
  CHECK(repeat(p, 0).duration() == 0.0);
  CHECK(repeat(p, 3).duration() == doctest::Approx(3 * pi / kOmega0));
  const auto joined = concatenate(p, frame_update(kSpectatorChannel, 0.3));
  CHECK(joined.find(kSpectatorChannel)->segments.back().frame_z == 0.3);
  CHECK(joined.find(kSpectatorChannel)->duration() == doctest::Approx(pi / kOmega0));
  const auto scaled = scale_amplitude(p, kTargetChannel, 0.5);
  CHECK(scaled.find(kTargetChannel)->segments[0].rabi.real() == doctest::Approx(kOmega0 / 2));
  CHECK_THROWS_AS(repeat(p, -1), Error);
  CHECK_THROWS_AS(scale_amplitude(p, kTargetChannel, -1.0), Error);
}
