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

#include "xtalk/noise.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "xtalk/error.hpp"
#include "xtalk/random.hpp"

namespace xtalk {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace

DriftProcess DriftProcess::enclosed() { return {3.5e-3, 0.05, 8.0, DriftPreset::Enclosed}; }

// No ramp is quoted for the exposed setup; all of its variance is random walk.
DriftProcess DriftProcess::exposed() { return {0.0, 0.49, 8.0, DriftPreset::Exposed}; }

void DriftProcess::validate() const {
  require(std::isfinite(rate_rad_per_min), "drift rate must be finite");
  require(sigma_rad >= 0.0 && std::isfinite(sigma_rad), "drift sigma must be >= 0");
  require(window_min > 0.0 && std::isfinite(window_min), "drift window must be > 0");
}

double DriftProcess::diffusion() const {
  validate();
  // A ramp of length T contributes (rate T)^2 / 12 to the trace variance, a
  // Wiener process D T / 6.
  const double ramp = rate_rad_per_min * window_min;
  const double walk = sigma_rad * sigma_rad - ramp * ramp / 12.0;
  return walk > 0.0 ? 6.0 * walk / window_min : 0.0;
}

std::vector<double> sample_slow_drift(const DriftProcess& process, double duration_min, double dt_min,
                                      std::uint64_t seed) {
  process.validate();
  require(dt_min > 0.0 && std::isfinite(dt_min), "drift dt must be > 0");
  require(duration_min >= 0.0 && std::isfinite(duration_min), "drift duration must be >= 0");
  const auto steps = static_cast<std::size_t>(std::floor(duration_min / dt_min + 1e-9));
  const double step_sigma = std::sqrt(process.diffusion() * dt_min);
  Rng rng = make_rng(seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> trace(steps + 1, 0.0);
  for (std::size_t i = 1; i <= steps; ++i) {
    double increment = process.rate_rad_per_min * dt_min;
    if (step_sigma > 0.0) increment += step_sigma * normal(rng);
    trace[i] = trace[i - 1] + increment;
  }
  return trace;
}

double trace_std(const std::vector<double>& trace) {
  if (trace.empty()) return 0.0;
  double mean = 0.0;
  for (double v : trace) mean += v;
  mean /= static_cast<double>(trace.size());
  double var = 0.0;
  for (double v : trace) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(trace.size()));
}

void AomModel::validate() const {
  require(center_mhz > 0.0 && efficiency_width_mhz > 0.0, "AOM efficiency curve parameters must be > 0");
  require(absorption_center_mhz > 0.0 && absorption_hwhm_mhz > 0.0, "AOM absorption curve parameters must be > 0");
  require(tau_s > 0.0 && std::isfinite(tau_s), "thermal time constant must be > 0");
  require(std::isfinite(k_phi_rad_per_w_s), "k_phi must be finite");
  require(max_power_w > 0.0, "max RF power must be > 0");
  require(phase_weight_mismatch >= 0.0 && phase_weight_mismatch <= 1.0, "phase weight mismatch must lie in [0, 1]");
}

double diffraction_efficiency(const AomModel& model, double f_mhz) {
  require(f_mhz > 0.0, "RF frequency must be > 0");
  const double u = (f_mhz - model.center_mhz) / model.efficiency_width_mhz;
  return std::exp(-0.5 * u * u);
}

double rf_absorption(const AomModel& model, double f_mhz) {
  require(f_mhz > 0.0, "RF frequency must be > 0");
  const double u = (f_mhz - model.absorption_center_mhz) / model.absorption_hwhm_mhz;
  return 1.0 / (1.0 + u * u);
}

double phase_weight(const AomModel& model, double f_mhz) {
  return 1.0 - model.phase_weight_mismatch * (1.0 - diffraction_efficiency(model, f_mhz));
}

DutyCycleState step_duty_cycle(const DutyCycleState& state, const AomModel& model,
                               const std::array<RfDrive, 2>& drive, double dt_s) {
  require(dt_s > 0.0 && std::isfinite(dt_s), "duty-cycle step must be > 0");
  model.validate();
  DutyCycleState next = state;
  const double decay = std::exp(-dt_s / model.tau_s);
  const double rise = -std::expm1(-dt_s / model.tau_s);
  std::array<double, 2> integral{};
  for (int c = 0; c < 2; ++c) {
    require(drive[c].power_w >= 0.0 && drive[c].power_w <= model.max_power_w, "RF power outside [0, max]");
    const double target = drive[c].power_w > 0.0
                              ? drive[c].power_w * rf_absorption(model, drive[c].freq_mhz) *
                                    phase_weight(model, drive[c].freq_mhz)
                              : 0.0;
    const double gap = state.filtered_power[c] - target;
    next.filtered_power[c] = target + gap * decay;
    integral[c] = target * dt_s + gap * model.tau_s * rise;
  }
  next.phase += model.k_phi_rad_per_w_s * (integral[0] - integral[1]);
  next.clock_s += dt_s;
  return next;
}

double DutyCycleSchedule::gate_length(double ratio) const {
  require(ratio > 0.0 && ratio <= 1.0, "duty-cycle ratio must lie in (0, 1]");
  require(probe_s > 0.0 && overhead_s >= 0.0, "schedule durations invalid");
  return probe_s * (1.0 / ratio - 1.0);
}

double matched_drive_power(const AomModel& model, const DutyCycleSchedule& schedule) {
  return schedule.mitigation_power_w * rf_absorption(model, schedule.mitigation_freq_mhz) /
         rf_absorption(model, model.center_mhz);
}

std::vector<std::pair<std::array<RfDrive, 2>, double>> duty_cycle_pieces(const AomModel& model,
                                                                         const DutyCycleSchedule& schedule,
                                                                         double ratio) {
  const double gate = schedule.gate_length(ratio);
  const RfDrive carrier{matched_drive_power(model, schedule), model.center_mhz};
  const RfDrive off{0.0, model.center_mhz};
  const RfDrive tone =
      schedule.mitigation ? RfDrive{schedule.mitigation_power_w, schedule.mitigation_freq_mhz} : off;
  std::vector<std::pair<std::array<RfDrive, 2>, double>> pieces;
  if (gate > 0.0) pieces.push_back({{carrier, tone}, gate});
  pieces.push_back({{carrier, carrier}, schedule.probe_s});
  if (schedule.overhead_s > 0.0) pieces.push_back({{off, off}, schedule.overhead_s});
  return pieces;
}

double duty_cycle_drift_rate(const AomModel& model, const DutyCycleSchedule& schedule, double ratio,
                             double settle_tau, double measure_s) {
  const auto pieces = duty_cycle_pieces(model, schedule, ratio);
  DutyCycleState state;
  auto cycle = [&] {
    for (const auto& [drive, dt] : pieces) state = step_duty_cycle(state, model, drive, dt);
  };
  while (state.clock_s < settle_tau * model.tau_s) cycle();
  const double phase0 = state.phase;
  const double t0 = state.clock_s;
  do cycle();
  while (state.clock_s - t0 < measure_s);
  return (state.phase - phase0) / (state.clock_s - t0);
}

PhaseTrace duty_cycle_phase_trace(const AomModel& model, const DutyCycleSchedule& schedule, double ratio,
                                  double settle_tau, double duration_s, double interval_s) {
  require(interval_s > 0.0 && duration_s >= interval_s, "trace needs 0 < interval <= duration");
  const auto pieces = duty_cycle_pieces(model, schedule, ratio);
  DutyCycleState state;
  auto cycle = [&] {
    for (const auto& [drive, dt] : pieces) state = step_duty_cycle(state, model, drive, dt);
  };
  while (state.clock_s < settle_tau * model.tau_s) cycle();
  const double t0 = state.clock_s;
  PhaseTrace trace;
  trace.time_s.push_back(0.0);
  trace.phase_rad.push_back(state.phase);
  for (double next = interval_s; next <= duration_s * (1.0 + 1e-12); next += interval_s) {
    while (state.clock_s - t0 < next) cycle();
    trace.time_s.push_back(state.clock_s - t0);
    trace.phase_rad.push_back(state.phase);
  }
  return trace;
}

double duty_cycle_drift_rate_analytic(const AomModel& model, const DutyCycleSchedule& schedule, double ratio) {
  double period = 0.0;
  double difference = 0.0;
  for (const auto& [drive, dt] : duty_cycle_pieces(model, schedule, ratio)) {
    period += dt;
    double load[2];
    for (int c = 0; c < 2; ++c)
      load[c] = drive[c].power_w * rf_absorption(model, drive[c].freq_mhz) * phase_weight(model, drive[c].freq_mhz);
    difference += (load[0] - load[1]) * dt;
  }
  return model.k_phi_rad_per_w_s * difference / period;
}

double calibrate_k_phi(const AomModel& model, const DutyCycleSchedule& schedule, double ratio,
                       double rate_rad_per_s) {
  AomModel unit = model;
  unit.k_phi_rad_per_w_s = 1.0;
  DutyCycleSchedule plain = schedule;
  plain.mitigation = false;
  const double per_k = duty_cycle_drift_rate_analytic(unit, plain, ratio);
  if (!(per_k > 0.0)) fail(ErrorKind::InvalidArgument, "schedule produces no unmitigated drift");
  return rate_rad_per_s / per_k;
}

AomModel default_aom_model() {
  AomModel m;
  m.k_phi_rad_per_w_s = calibrate_k_phi(m, DutyCycleSchedule{}, 1e-3, 0.35);
  return m;
}

void BeatnoteSetup::validate() const {
  require(f2_mhz - f1_mhz > 0.0, "beatnote requires f2 > f1");
  require(probe_s > 0.0, "beatnote probe duration must be > 0");
}

double wrap_phase(double phase) {
  double r = std::remainder(phase, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double beatnote_phase_measurement(const BeatnoteSetup& setup, double true_phase, double sigma,
                                  std::uint64_t seed) {
  setup.validate();
  require(sigma >= 0.0 && std::isfinite(sigma), "detector noise must be >= 0");
  double measured = true_phase;
  if (sigma > 0.0) {
    Rng rng = make_rng(seed, 0);
    measured += std::normal_distribution<double>(0.0, sigma)(rng);
  }
  return wrap_phase(measured);
}

double ramsey_probability(double delta_phi) { return 0.5 * (1.0 - std::cos(delta_phi)); }

double ramsey_phase_probe(double delta_phi, std::uint64_t shots, std::uint64_t seed) {
  require(shots >= 1, "Ramsey probe needs at least one shot");
  Rng rng = make_rng(seed, 0);
  return sample_fraction(ramsey_probability(delta_phi), shots, rng);
}

namespace {

using nlohmann::json;

template <typename Fn>
void for_keys(const json& obj, const char* section, Fn&& fn) {
  if (!obj.is_object()) fail(ErrorKind::Configuration, std::string(section) + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!fn(key, value)) fail(ErrorKind::Configuration, std::string(section) + ": unknown key '" + key + "'");
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) fail(ErrorKind::Configuration, key + ": expected a number");
  return v.get<double>();
}

DriftPreset parse_preset(const std::string& tag) {
  if (tag == "enclosed") return DriftPreset::Enclosed;
  if (tag == "exposed") return DriftPreset::Exposed;
  if (tag == "custom") return DriftPreset::Custom;
  fail(ErrorKind::Configuration, "drift.preset: unknown preset '" + tag + "'");
}

const char* preset_name(DriftPreset p) {
  switch (p) {
    case DriftPreset::Enclosed: return "enclosed";
    case DriftPreset::Exposed: return "exposed";
    default: return "custom";
  }
}

}  // namespace

NoisePresets parse_noise_presets(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Configuration, std::string("noise presets: ") + e.what());
  }
  NoisePresets out;
  bool k_phi_given = false;
  for_keys(doc, "noise", [&](const std::string& key, const json& v) {
    if (key == "drift") {
      // The preset tag picks the base values; explicit keys override them.
      if (v.is_object() && v.contains("preset")) {
        if (!v["preset"].is_string()) fail(ErrorKind::Configuration, "drift.preset: expected a string");
        const auto p = parse_preset(v["preset"].get<std::string>());
        out.drift = p == DriftPreset::Exposed ? DriftProcess::exposed()
                    : p == DriftPreset::Enclosed ? DriftProcess::enclosed()
                                                 : DriftProcess{};
      }
      for_keys(v, "drift", [&](const std::string& k, const json& x) {
        if (k == "preset") return true;
        if (k == "rate_rad_per_min") out.drift.rate_rad_per_min = number(x, k);
        else if (k == "sigma_rad") out.drift.sigma_rad = number(x, k);
        else if (k == "window_min") out.drift.window_min = number(x, k);
        else return false;
        return true;
      });
      return true;
    }
    if (key == "aom") {
      for_keys(v, "aom", [&](const std::string& k, const json& x) {
        auto& a = out.aom;
        if (k == "center_mhz") a.center_mhz = number(x, k);
        else if (k == "efficiency_width_mhz") a.efficiency_width_mhz = number(x, k);
        else if (k == "absorption_center_mhz") a.absorption_center_mhz = number(x, k);
        else if (k == "absorption_hwhm_mhz") a.absorption_hwhm_mhz = number(x, k);
        else if (k == "k_phi_rad_per_w_s") { a.k_phi_rad_per_w_s = number(x, k); k_phi_given = true; }
        else if (k == "tau_s") a.tau_s = number(x, k);
        else if (k == "max_power_w") a.max_power_w = number(x, k);
        else if (k == "phase_weight_mismatch") a.phase_weight_mismatch = number(x, k);
        else return false;
        return true;
      });
      return true;
    }
    if (key == "beatnote") {
      for_keys(v, "beatnote", [&](const std::string& k, const json& x) {
        if (k == "f1_mhz") out.beatnote.f1_mhz = number(x, k);
        else if (k == "f2_mhz") out.beatnote.f2_mhz = number(x, k);
        else if (k == "probe_s") out.beatnote.probe_s = number(x, k);
        else return false;
        return true;
      });
      return true;
    }
    return false;
  });
  try {
    out.drift.validate();
    out.aom.validate();
    out.beatnote.validate();
    if (!k_phi_given) out.aom.k_phi_rad_per_w_s = calibrate_k_phi(out.aom, DutyCycleSchedule{}, 1e-3, 0.35);
  } catch (const Error& e) {
    fail(ErrorKind::Configuration, std::string("noise presets: ") + e.what());
  }
  return out;
}

std::string dump_noise_presets(const NoisePresets& p) {
  json doc;
  doc["drift"] = {{"preset", preset_name(p.drift.preset)},
                  {"rate_rad_per_min", p.drift.rate_rad_per_min},
                  {"sigma_rad", p.drift.sigma_rad},
                  {"window_min", p.drift.window_min}};
  doc["aom"] = {{"center_mhz", p.aom.center_mhz},
                {"efficiency_width_mhz", p.aom.efficiency_width_mhz},
                {"absorption_center_mhz", p.aom.absorption_center_mhz},
                {"absorption_hwhm_mhz", p.aom.absorption_hwhm_mhz},
                {"k_phi_rad_per_w_s", p.aom.k_phi_rad_per_w_s},
                {"tau_s", p.aom.tau_s},
                {"max_power_w", p.aom.max_power_w},
                {"phase_weight_mismatch", p.aom.phase_weight_mismatch}};
  doc["beatnote"] = {{"f1_mhz", p.beatnote.f1_mhz}, {"f2_mhz", p.beatnote.f2_mhz}, {"probe_s", p.beatnote.probe_s}};
  return doc.dump(2);
}

NoisePresets load_noise_presets(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Configuration, "cannot open noise preset file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_noise_presets(buf.str());
}

void save_noise_presets(const NoisePresets& presets, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Configuration, "cannot write noise preset file: " + path);
  out << dump_noise_presets(presets) << '\n';
}

}  // namespace xtalk
