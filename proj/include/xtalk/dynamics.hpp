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

// Exact two-level evolution in the frame rotating at the drive frequency.
//
// Hamiltonian convention (hbar = 1):
//
//   H = 1/2 * ( Re(W) X + Im(W) Y + detuning Z ),   W = rabi * exp(i phase)
//
// so an axis phase of 0 rotates about +X and pi/2 about +Y. Every propagator
// is U = cos(a) I - i sin(a) (n . sigma) with a = W~ t / 2 and
// W~ = sqrt(|W|^2 + detuning^2).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

#include "xtalk/error.hpp"

namespace xtalk {

template <typename Scalar>
using Unitary2T = Eigen::Matrix<std::complex<Scalar>, 2, 2>;
template <typename Scalar>
using QubitStateT = Eigen::Matrix<std::complex<Scalar>, 2, 1>;

using ComplexAmplitude = std::complex<double>;
using Unitary2 = Unitary2T<double>;
using QubitState = QubitStateT<double>;

/// One square drive segment. `rabi` carries the amplitude (rad/s) and any
/// intrinsic field phase; `phase` is the axis phase added on top. `frame_z`
/// is a software Z rotation applied after the segment (Pauli frame update).
template <typename Scalar>
struct PulseSegmentT {
  std::complex<Scalar> rabi{};
  Scalar detuning = 0;
  Scalar duration = 0;
  Scalar phase = 0;
  Scalar frame_z = 0;

  std::complex<Scalar> drive() const { return rabi * std::polar(Scalar(1), phase); }
};
using PulseSegment = PulseSegmentT<double>;

namespace detail {
template <typename Scalar>
inline bool finite(std::complex<Scalar> z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}
}  // namespace detail

template <typename Scalar = double>
QubitStateT<Scalar> ket0() {
  return QubitStateT<Scalar>(1, 0);
}

template <typename Scalar = double>
QubitStateT<Scalar> ket1() {
  return QubitStateT<Scalar>(0, 1);
}

/// Propagator for a constant drive `rabi` (rad/s) at `detuning` (rad/s) over
/// `duration` seconds.
template <typename Scalar>
Unitary2T<Scalar> rotation_unitary(std::complex<Scalar> rabi, Scalar detuning, Scalar duration) {
  if (!detail::finite(rabi) || !std::isfinite(detuning) || !std::isfinite(duration))
    fail(ErrorKind::InvalidArgument, "rotation_unitary: non-finite input");
  if (duration < 0) fail(ErrorKind::InvalidArgument, "rotation_unitary: negative duration");

  using C = std::complex<Scalar>;
  const Scalar generalized = std::sqrt(std::norm(rabi) + detuning * detuning);
  Unitary2T<Scalar> u = Unitary2T<Scalar>::Identity();
  if (generalized == Scalar(0) || duration == Scalar(0)) return u;

  const Scalar half = generalized * duration / 2;
  const Scalar c = std::cos(half);
  const Scalar s = std::sin(half) / generalized;
  const C i(0, 1);
  // -i s (Re W X + Im W Y + d Z)
  u(0, 0) = C(c, 0) - i * s * detuning;
  u(1, 1) = C(c, 0) + i * s * detuning;
  u(0, 1) = -i * s * std::conj(rabi);
  u(1, 0) = -i * s * rabi;
  return u;
}

template <typename Scalar>
Unitary2T<Scalar> rotation_unitary(const PulseSegmentT<Scalar>& segment) {
  return rotation_unitary(segment.drive(), segment.detuning, segment.duration);
}

/// Ideal rotation by `angle` about the equatorial axis at `axis_phase`.
template <typename Scalar>
Unitary2T<Scalar> axis_rotation(Scalar angle, Scalar axis_phase) {
  return rotation_unitary(std::polar(Scalar(1), axis_phase), Scalar(0), angle);
}

/// exp(-i angle Z / 2).
template <typename Scalar>
Unitary2T<Scalar> z_rotation(Scalar angle) {
  Unitary2T<Scalar> u = Unitary2T<Scalar>::Zero();
  u(0, 0) = std::polar(Scalar(1), -angle / 2);
  u(1, 1) = std::polar(Scalar(1), angle / 2);
  return u;
}

template <typename Scalar>
QubitStateT<Scalar> apply(const Unitary2T<Scalar>& u, const QubitStateT<Scalar>& psi) {
  return u * psi;
}

/// 1 - |<psi0|U|psi0>|^2, clamped to [0, 1].
template <typename Scalar>
Scalar rotation_error(const QubitStateT<Scalar>& psi0, const Unitary2T<Scalar>& u) {
  const Scalar overlap = std::norm(psi0.dot(u * psi0));
  return std::clamp(Scalar(1) - overlap, Scalar(0), Scalar(1));
}

/// Rotation error maximized over initial states. The maximum is reached by
/// states orthogonal to the rotation axis and equals sin^2(W~ t / 2); it
/// does not carry the |W|^2 / W~^2 factor that the population transfer from
/// |0> does.
template <typename Scalar>
Scalar max_rotation_error(std::complex<Scalar> rabi, Scalar detuning, Scalar duration) {
  if (duration < 0) fail(ErrorKind::InvalidArgument, "max_rotation_error: negative duration");
  const Scalar generalized = std::sqrt(std::norm(rabi) + detuning * detuning);
  const Scalar s = std::sin(generalized * duration / 2);
  return s * s;
}

/// max |U^dagger U - I|.
template <typename Scalar>
Scalar unitarity_defect(const Unitary2T<Scalar>& u) {
  return (u.adjoint() * u - Unitary2T<Scalar>::Identity()).cwiseAbs().maxCoeff();
}

/// Phase-insensitive gate fidelity |Tr(U^dagger V)|^2 / 4.
template <typename Scalar>
Scalar gate_fidelity(const Unitary2T<Scalar>& u, const Unitary2T<Scalar>& v) {
  return std::norm((u.adjoint() * v).trace()) / Scalar(4);
}

template <typename Scalar>
Scalar excited_population(const QubitStateT<Scalar>& psi) {
  return std::norm(psi(1));
}

/// Z rotation angle that, applied after `u`, removes the net Z component of
/// its ZXZ Euler decomposition. Used as the Pauli frame update for
/// composite sequences with a residual geometric phase.
template <typename Scalar>
Scalar residual_frame_phase(const Unitary2T<Scalar>& u) {
  return std::arg(u(0, 0)) - std::arg(u(1, 1));
}

}  // namespace xtalk
