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
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles/oracles.hpp"
#include "xtalk/dynamics.hpp"
#include "xtalk/error.hpp"

using namespace xtalk;
using std::numbers::pi;

namespace {

Unitary2 from_oracle(const oracle::Mat2& m) {
  Unitary2 u;
  u << m.a, m.b, m.c, m.d;
  return u;
}

QubitState random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  QubitState psi(ComplexAmplitude(n(rng), n(rng)), ComplexAmplitude(n(rng), n(rng)));
  return psi / psi.norm();
}

Unitary2 random_unitary(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  return rotation_unitary(ComplexAmplitude(u(rng), u(rng)), u(rng), std::abs(u(rng)));
}

}  // namespace

TEST_CASE("resonant pi rotation flips the qubit") {
  const Unitary2 u = rotation_unitary(ComplexAmplitude(2.0, 0.0), 0.0, pi / 2.0);
  CHECK(std::abs(u(0, 1)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(u(0, 0)) < 1e-15);
  CHECK(excited_population(xtalk::apply(u, ket0())) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("zero drive and detuning give the identity") {
  for (double t : {0.0, 1.0, 1e3}) {
    const Unitary2 u = rotation_unitary(ComplexAmplitude(0.0, 0.0), 0.0, t);
    CHECK((u - Unitary2::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("half transfer at equal drive and detuning matches an ODE integration") {
  const double omega = 1.3;
  const double gen = std::sqrt(2.0) * omega;
  const double t = pi / gen;
  const Unitary2 u = rotation_unitary(ComplexAmplitude(omega, 0.0), omega, t);
  const Unitary2 ref = from_oracle(oracle::rk4_propagator(omega, omega, t, 20000));
  CHECK(excited_population(xtalk::apply(ref, ket0())) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(excited_population(xtalk::apply(u, ket0())) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("closed form agrees with RK4 entry by entry") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexAmplitude w(u(rng), u(rng));
    const double delta = u(rng);
    const double t = 0.1 + std::abs(u(rng)) * 3.0;
    const Unitary2 closed = rotation_unitary(w, delta, t);
    const Unitary2 ode = from_oracle(oracle::rk4_propagator(w, delta, t, 10000));
    CHECK((closed - ode).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("propagators are unitary with unit determinant") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const Unitary2 u = random_unitary(rng);
    CHECK(unitarity_defect(u) <= 1e-10);
    CHECK(std::abs(std::abs(u.determinant()) - 1.0) <= 1e-10);
  }
}

TEST_CASE("evolution composes over split durations") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const ComplexAmplitude w(u(rng), u(rng));
    const double d = u(rng), t1 = std::abs(u(rng)), t2 = std::abs(u(rng));
    const Unitary2 whole = rotation_unitary(w, d, t1 + t2);
    const Unitary2 split = rotation_unitary(w, d, t2) * rotation_unitary(w, d, t1);
    CHECK((whole - split).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("invalid inputs are rejected") {
  const double nan = std::nan("");
  CHECK_THROWS_AS(rotation_unitary(ComplexAmplitude(nan, 0.0), 0.0, 1.0), Error);
  CHECK_THROWS_AS(rotation_unitary(ComplexAmplitude(1.0, 0.0), std::numeric_limits<double>::infinity(), 1.0), Error);
  CHECK_THROWS_AS(rotation_unitary(ComplexAmplitude(1.0, 0.0), 0.0, -1.0), Error);
  try {
    rotation_unitary(ComplexAmplitude(1.0, 0.0), 0.0, nan);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("apply preserves the norm") {
  std::mt19937_64 rng(14);
  CHECK((xtalk::apply(Unitary2(Unitary2::Identity()), ket0()) - ket0()).norm() == 0.0);
  const QubitState flipped = xtalk::apply(axis_rotation(pi, 0.0), ket0());
  CHECK(std::abs(flipped(1)) == doctest::Approx(1.0));
  for (int i = 0; i < 500; ++i) {
    const QubitState out = xtalk::apply(random_unitary(rng), random_state(rng));
    CHECK(std::abs(out.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("rotation error basics") {
  CHECK(rotation_error(ket0(), Unitary2(Unitary2::Identity())) == 0.0);
  CHECK(rotation_error(ket0(), axis_rotation(pi, 0.0)) == doctest::Approx(1.0).epsilon(1e-15));
  std::mt19937_64 rng(15);
  for (int i = 0; i < 100; ++i) {
    const Unitary2 u = random_unitary(rng);
    const QubitState psi = random_state(rng);
    const double e = rotation_error(psi, u);
    CHECK(e >= 0.0);
    CHECK(e <= 1.0);
    const ComplexAmplitude g = std::polar(1.0, 2.0 * pi * i / 100.0);
    CHECK(std::abs(rotation_error(QubitState(g * psi), u) - e) <= 1e-14);
    CHECK(std::abs(rotation_error(psi, Unitary2(g * u)) - e) <= 1e-14);
  }
}

TEST_CASE("axis-orthogonal error equals the state maximum") {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double omega = u(rng), t = u(rng);
    // Drive along X; |0> lies on the equator orthogonal to it.
    const Unitary2 rot = rotation_unitary(ComplexAmplitude(omega, 0.0), 0.0, t);
    CHECK(std::abs(rotation_error(ket0(), rot) - max_rotation_error(ComplexAmplitude(omega, 0.0), 0.0, t)) <= 1e-12);
  }
}

TEST_CASE("max rotation error on resonance") {
  CHECK(max_rotation_error(ComplexAmplitude(1.0, 0.0), 0.0, pi) == doctest::Approx(1.0).epsilon(1e-15));
  const double e = max_rotation_error(ComplexAmplitude(0.096, 0.0), 0.0, pi);
  CHECK(std::abs(e - 2.26e-2) < 5e-5);
  CHECK(e == doctest::Approx(std::pow(std::sin(0.048 * pi), 2)).epsilon(1e-14));
}

TEST_CASE("max rotation error off resonance matches brute-force maximization") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    const ComplexAmplitude w(u(rng), u(rng));
    const double d = u(rng), t = std::abs(u(rng)) + 0.1;
    const oracle::Mat2 m = oracle::rk4_propagator(w, d, t, 4000);
    const double brute = oracle::brute_force_max_error(m, 1000, rng);
    CHECK(std::abs(brute - max_rotation_error(w, d, t)) <= 1e-6);
  }
}

TEST_CASE("scalar type is a template parameter") {
  const auto u = rotation_unitary(std::complex<long double>(1.0L, 0.0L), 0.5L, 2.0L);
  CHECK(unitarity_defect(u) < 1e-15L);
  const auto v = rotation_unitary(std::complex<float>(1.0f, 0.0f), 0.0f, static_cast<float>(pi));
  CHECK(excited_population(xtalk::apply(v, ket0<float>())) == doctest::Approx(1.0).epsilon(1e-6));
}
