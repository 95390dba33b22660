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

// Origin of addressing crosstalk: waveguide-device leakage plus diffraction
// from clipping a focused Gaussian mode at a finite-NA aperture.
//
// The diffraction model is one dimensional (the line of cores). A focal
// Gaussian field exp(-x^2 / w0^2) has the angular spectrum
// A(s) = exp(-(k s w0 / 2)^2) over direction sines s; the lens passes
// |s| <= NA and the focal field is
//
//   E(x) = k / (2 pi) * integral_{-a}^{a} A(s) exp(i k s x) ds,
//
// with a = min(NA, 6 pupil waists). The pupil 1/e^2 intensity half-width is
// the Gaussian divergence angle lambda / (pi w0).

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace xtalk {

struct DiffractionOptions {
  double tolerance = 1e-6;          // relative to the on-axis field
  int initial_intervals = 64;
  int max_intervals = 1 << 18;
};

/// Divergence half-angle lambda / (pi w0), the pupil Gaussian waist.
double pupil_waist(double waist_um, double wavelength_nm);

/// Unnormalized focal field at `x_um` (units such that Parseval holds with
/// pupil_power). Throws numerical-failure if the quadrature does not settle.
std::complex<double> focal_field(double waist_um, double wavelength_nm, double numerical_aperture,
                                 double x_um, const DiffractionOptions& options = {});

/// Focal-plane intensity on `grid_um`, normalized to the on-axis value.
Eigen::VectorXd clipped_focus_profile(double waist_um, double wavelength_nm, double numerical_aperture,
                                      const std::vector<double>& grid_um,
                                      const DiffractionOptions& options = {});

/// exp(-2 x^2 / w0^2).
Eigen::VectorXd gaussian_profile(double waist_um, const std::vector<double>& grid_um);

/// Power passed by the aperture, k/(2 pi) * integral |A(s)|^2 ds, closed form.
double pupil_power(double waist_um, double wavelength_nm, double numerical_aperture);

/// Device field maps: `core_fields[j]` is the complex relative field on
/// `grid_um` when only core j is lit.
struct BeamProfile {
  std::vector<double> core_positions_um;
  std::vector<double> grid_um;
  std::vector<Eigen::VectorXcd> core_fields;
  double wavelength_nm = 729.0;
  double numerical_aperture = 0.35;
  double waist_um = 1.6;
  double pitch_um = 5.0;

  void validate() const;
  std::size_t core_count() const { return core_positions_um.size(); }
};

struct DeviceModel {
  int cores = 11;
  double pitch_um = 5.0;
  double waist_um = 1.6;
  double wavelength_nm = 729.0;
  double numerical_aperture = 0.35;
  /// Nearest-neighbour field leakage. 0.1 gives ~1e-2 intensity at one pitch.
  double leakage = 0.1;
  double grid_half_width_um = 30.0;
  double grid_step_um = 0.05;
};

/// Per-core Gaussian modes with nearest-neighbour field leakage.
BeamProfile default_device_profile(const DeviceModel& model = {});

/// Single-core profile read from a `position_um,relative_field` CSV. The lit
/// core sits at position 0.
BeamProfile load_device_map_csv(const std::string& path, const DeviceModel& optics = {});
void save_device_map_csv(const std::string& path, const BeamProfile& profile, std::size_t core);

struct CrosstalkRatio {
  double intensity_ratio = 0.0;  // at the requested relative phase
  double rabi_ratio = 0.0;       // pol_overlap * sqrt(intensity_ratio)
  double incoherent_intensity_ratio = 0.0;
  double best_case_intensity_ratio = 0.0;   // fields in antiphase
  double worst_case_intensity_ratio = 0.0;  // fields in phase
};

/// Device plus diffraction crosstalk at `separation_um` from the lit core.
///
/// `diffraction_intensity` is sampled on `profile.grid_um` shifted so the lit
/// core sits at the origin, i.e. entry i is I_diff(grid[i] - x_core).
/// `relative_phase` is the phase of the diffraction field relative to the
/// device field; 0 is the in-phase worst case.
CrosstalkRatio total_crosstalk_ratio(const BeamProfile& profile, const Eigen::VectorXd& diffraction_intensity,
                                     double separation_um, double pol_overlap, std::size_t lit_core = 0,
                                     double relative_phase = 0.0);

/// Diffraction intensity for `profile` arranged as total_crosstalk_ratio expects.
Eigen::VectorXd diffraction_on_profile(const BeamProfile& profile, std::size_t lit_core,
                                       const DiffractionOptions& options = {});

}  // namespace xtalk
