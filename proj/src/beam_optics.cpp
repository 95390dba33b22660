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

#include "xtalk/beam_optics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "xtalk/error.hpp"

namespace xtalk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPupilWindowWaists = 6.0;

double wavenumber_per_um(double wavelength_nm) { return 2.0 * kPi / (wavelength_nm * 1e-3); }

void check_optics(double waist_um, double wavelength_nm, double numerical_aperture) {
  if (!(waist_um > 0.0) || !(wavelength_nm > 0.0) || !(numerical_aperture > 0.0) ||
      !std::isfinite(waist_um) || !std::isfinite(wavelength_nm) || !std::isfinite(numerical_aperture))
    fail(ErrorKind::InvalidArgument, "waist, wavelength and NA must be positive and finite");
}

double aperture_limit(double waist_um, double wavelength_nm, double numerical_aperture) {
  return std::min(numerical_aperture, kPupilWindowWaists * pupil_waist(waist_um, wavelength_nm));
}

// Composite Simpson over [0, a] of A(s) cos(k s x), A(s) = exp(-(k w0 s / 2)^2).
double simpson_half_integral(double k, double w0, double a, double x, int intervals) {
  const double h = a / intervals;
  const double g = k * w0 / 2.0;
  auto f = [&](double s) { return std::exp(-(g * s) * (g * s)) * std::cos(k * s * x); };
  double odd = 0.0;
  double even = 0.0;
  for (int i = 1; i < intervals; ++i) {
    const double v = f(i * h);
    if (i % 2) odd += v;
    else even += v;
  }
  return h / 3.0 * (f(0.0) + 4.0 * odd + 2.0 * even + f(a));
}

double on_axis_field(double k, double w0, double a) {
  // k/(2 pi) * sqrt(pi) * (2 / (k w0)) * erf(k w0 a / 2)
  return k / (2.0 * kPi) * std::sqrt(kPi) * (2.0 / (k * w0)) * std::erf(k * w0 * a / 2.0);
}


std::complex<double> interpolate(const std::vector<double>& grid, const Eigen::VectorXcd& values, double x) {
  if (grid.empty() || x < grid.front() || x > grid.back())
    fail(ErrorKind::OutOfRange, "position outside the profile grid");
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  if (it == grid.end()) return values(values.size() - 1);
  const auto hi = static_cast<Eigen::Index>(it - grid.begin());
  const auto lo = hi - 1;
  const double t = (x - grid[lo]) / (grid[hi] - grid[lo]);
  return values(lo) * (1.0 - t) + values(hi) * t;
}

double interpolate(const std::vector<double>& grid, const Eigen::VectorXd& values, double x) {
  return interpolate(grid, Eigen::VectorXcd(values.cast<std::complex<double>>()), x).real();
}

}  // namespace

double pupil_waist(double waist_um, double wavelength_nm) {
  return wavelength_nm * 1e-3 / (kPi * waist_um);
}

std::complex<double> focal_field(double waist_um, double wavelength_nm, double numerical_aperture, double x_um,
                                 const DiffractionOptions& options) {
  check_optics(waist_um, wavelength_nm, numerical_aperture);
  if (!std::isfinite(x_um)) fail(ErrorKind::InvalidArgument, "focal_field: non-finite position");
  const double k = wavenumber_per_um(wavelength_nm);
  const double a = aperture_limit(waist_um, wavelength_nm, numerical_aperture);
  const double scale = on_axis_field(k, waist_um, a);

  // Start with at most half a radian of carrier phase per interval.
  int n = std::max(options.initial_intervals, 2);
  const double phase_span = k * a * std::abs(x_um);
  while (n < options.max_intervals && phase_span / n > 0.5) n *= 2;
  if (n % 2) ++n;

  double previous = simpson_half_integral(k, waist_um, a, x_um, n);
  while (n < options.max_intervals) {
    n *= 2;
    const double current = simpson_half_integral(k, waist_um, a, x_um, n);
    if (std::abs(current - previous) * (k / kPi) <= options.tolerance * scale)
      return {k / kPi * current, 0.0};
    previous = current;
  }
  fail(ErrorKind::NumericalFailure, "diffraction quadrature did not converge at x = " + std::to_string(x_um));
}

Eigen::VectorXd clipped_focus_profile(double waist_um, double wavelength_nm, double numerical_aperture,
                                      const std::vector<double>& grid_um, const DiffractionOptions& options) {
  check_optics(waist_um, wavelength_nm, numerical_aperture);
  if (grid_um.empty()) fail(ErrorKind::InvalidArgument, "clipped_focus_profile: empty grid");
  const double peak = std::norm(focal_field(waist_um, wavelength_nm, numerical_aperture, 0.0, options));
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid_um.size()));
  for (std::size_t i = 0; i < grid_um.size(); ++i)
    out(static_cast<Eigen::Index>(i)) =
        std::norm(focal_field(waist_um, wavelength_nm, numerical_aperture, grid_um[i], options)) / peak;
  return out;
}

Eigen::VectorXd gaussian_profile(double waist_um, const std::vector<double>& grid_um) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid_um.size()));
  for (std::size_t i = 0; i < grid_um.size(); ++i) {
    const double r = grid_um[i] / waist_um;
    out(static_cast<Eigen::Index>(i)) = std::exp(-2.0 * r * r);
  }
  return out;
}

double pupil_power(double waist_um, double wavelength_nm, double numerical_aperture) {
  check_optics(waist_um, wavelength_nm, numerical_aperture);
  const double k = wavenumber_per_um(wavelength_nm);
  const double a = aperture_limit(waist_um, wavelength_nm, numerical_aperture);
  const double c = (k * waist_um) * (k * waist_um) / 2.0;
  return k / (2.0 * kPi) * std::sqrt(kPi / c) * std::erf(a * std::sqrt(c));
}

void BeamProfile::validate() const {
  if (!(pitch_um > 0.0)) fail(ErrorKind::InvalidArgument, "pitch must be > 0");
  if (grid_um.size() < 2) fail(ErrorKind::InvalidArgument, "profile grid needs at least two points");
  for (std::size_t i = 1; i < grid_um.size(); ++i)
    if (!(grid_um[i] > grid_um[i - 1])) fail(ErrorKind::InvalidArgument, "profile grid must be strictly increasing");
  if (core_fields.size() != core_positions_um.size())
    fail(ErrorKind::InvalidArgument, "one field map per core is required");
  for (const auto& f : core_fields)
    if (f.size() != static_cast<Eigen::Index>(grid_um.size()))
      fail(ErrorKind::InvalidArgument, "field map length differs from grid");
}

BeamProfile default_device_profile(const DeviceModel& model) {
  if (model.cores < 1 || !(model.pitch_um > 0.0) || !(model.grid_step_um > 0.0))
    fail(ErrorKind::InvalidArgument, "device model needs cores >= 1 and positive pitch/step");
  BeamProfile p;
  p.wavelength_nm = model.wavelength_nm;
  p.numerical_aperture = model.numerical_aperture;
  p.waist_um = model.waist_um;
  p.pitch_um = model.pitch_um;

  const double centre = (model.cores - 1) / 2.0;
  for (int j = 0; j < model.cores; ++j) p.core_positions_um.push_back((j - centre) * model.pitch_um);
  const double half = model.grid_half_width_um + p.core_positions_um.back();
  const auto points = static_cast<int>(std::lround(2.0 * half / model.grid_step_um)) + 1;
  for (int i = 0; i < points; ++i) p.grid_um.push_back(-half + i * model.grid_step_um);

  auto mode = [&](double x) {
    const double r = x / model.waist_um;
    return std::exp(-r * r);
  };
  for (int j = 0; j < model.cores; ++j) {
    Eigen::VectorXcd field(points);
    for (int i = 0; i < points; ++i) {
      const double x = p.grid_um[i];
      double v = mode(x - p.core_positions_um[j]);
      if (j > 0) v += model.leakage * mode(x - p.core_positions_um[j - 1]);
      if (j + 1 < model.cores) v += model.leakage * mode(x - p.core_positions_um[j + 1]);
      field(i) = v;
    }
    p.core_fields.push_back(std::move(field));
  }
  return p;
}

BeamProfile load_device_map_csv(const std::string& path, const DeviceModel& optics) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Configuration, "cannot open device map " + path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Configuration, "device map is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (line != "position_um,relative_field")
    fail(ErrorKind::Configuration, "device map header must be 'position_um,relative_field'");

  auto parse = [&](std::string_view s, std::size_t row) {
    while (!s.empty() && (s.front() == ' ')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      fail(ErrorKind::Configuration, "device map row " + std::to_string(row) + ": bad number");
    return v;
  };

  std::vector<double> xs;
  std::vector<double> fs;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail(ErrorKind::Configuration, "device map row " + std::to_string(row) + ": expected two columns");
    xs.push_back(parse(std::string_view(line).substr(0, comma), row));
    fs.push_back(parse(std::string_view(line).substr(comma + 1), row));
  }

  BeamProfile p;
  p.wavelength_nm = optics.wavelength_nm;
  p.numerical_aperture = optics.numerical_aperture;
  p.waist_um = optics.waist_um;
  p.pitch_um = optics.pitch_um;
  p.grid_um = std::move(xs);
  p.core_positions_um = {0.0};
  Eigen::VectorXcd field(static_cast<Eigen::Index>(fs.size()));
  for (std::size_t i = 0; i < fs.size(); ++i) field(static_cast<Eigen::Index>(i)) = fs[i];
  p.core_fields = {field};
  p.validate();
  return p;
}

void save_device_map_csv(const std::string& path, const BeamProfile& profile, std::size_t core) {
  profile.validate();
  if (core >= profile.core_count()) fail(ErrorKind::OutOfRange, "core index out of range");
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Configuration, "cannot write " + path);
  out << "position_um,relative_field\n";
  char buf[96];
  const double origin = profile.core_positions_um[core];
  for (std::size_t i = 0; i < profile.grid_um.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", profile.grid_um[i] - origin,
                  profile.core_fields[core](static_cast<Eigen::Index>(i)).real());
    out << buf;
  }
}

CrosstalkRatio total_crosstalk_ratio(const BeamProfile& profile, const Eigen::VectorXd& diffraction_intensity,
                                     double separation_um, double pol_overlap, std::size_t lit_core,
                                     double relative_phase) {
  profile.validate();
  if (lit_core >= profile.core_count()) fail(ErrorKind::OutOfRange, "lit core index out of range");
  if (diffraction_intensity.size() != static_cast<Eigen::Index>(profile.grid_um.size()))
    fail(ErrorKind::InvalidArgument, "diffraction intensity must be sampled on the profile grid");
  if (!(pol_overlap >= 0.0 && pol_overlap <= 1.0)) fail(ErrorKind::InvalidArgument, "pol_overlap must lie in [0, 1]");

  const double x_core = profile.core_positions_um[lit_core];
  const double x_spec = x_core + separation_um;
  const auto& field = profile.core_fields[lit_core];

  // An all-zero device map means no device crosstalk at all.
  const double device_ref = std::abs(interpolate(profile.grid_um, field, x_core));
  const double device = device_ref > 0.0 ? std::abs(interpolate(profile.grid_um, field, x_spec)) / device_ref : 0.0;

  const double diff_ref = interpolate(profile.grid_um, diffraction_intensity, x_core);
  const double diffraction =
      diff_ref > 0.0 ? std::sqrt(std::max(interpolate(profile.grid_um, diffraction_intensity, x_spec), 0.0) / diff_ref)
                     : 0.0;

  CrosstalkRatio r;
  r.intensity_ratio = std::norm(device + std::polar(diffraction, relative_phase));
  r.rabi_ratio = pol_overlap * std::sqrt(r.intensity_ratio);
  r.incoherent_intensity_ratio = device * device + diffraction * diffraction;
  r.best_case_intensity_ratio = (device - diffraction) * (device - diffraction);
  r.worst_case_intensity_ratio = (device + diffraction) * (device + diffraction);
  return r;
}

Eigen::VectorXd diffraction_on_profile(const BeamProfile& profile, std::size_t lit_core,
                                       const DiffractionOptions& options) {
  profile.validate();
  if (lit_core >= profile.core_count()) fail(ErrorKind::OutOfRange, "lit core index out of range");
  std::vector<double> shifted(profile.grid_um);
  for (auto& x : shifted) x -= profile.core_positions_um[lit_core];
  return clipped_focus_profile(profile.waist_um, profile.wavelength_nm, profile.numerical_aperture, shifted, options);
}

}  // namespace xtalk
