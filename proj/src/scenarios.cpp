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

#include "xtalk/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "xtalk/random.hpp"

#ifndef XTALK_GIT_DESCRIBE
#define XTALK_GIT_DESCRIBE "unknown"
#endif

namespace xtalk {

namespace {

constexpr double kPi = std::numbers::pi;
using nlohmann::json;

struct NamedScenario {
  Scenario id;
  const char* name;
};

constexpr NamedScenario kScenarios[] = {
    {Scenario::XError, "x-error"},
    {Scenario::ZError, "z-error"},
    {Scenario::PhaseScan, "phase-scan"},
    {Scenario::RabiScan, "rabi-scan"},
    {Scenario::AmplitudeScan, "amplitude-scan"},
    {Scenario::DriftMonitor, "drift-monitor"},
    {Scenario::DutyCycleSweep, "duty-cycle-sweep"},
    {Scenario::BeamProfile, "beam-profile"},
    {Scenario::Calibrate, "calibrate"},
};

[[noreturn]] void config_error(const std::string& what) { fail(ErrorKind::Configuration, what); }

double num(const json& v, const std::string& key) {
  if (!v.is_number()) config_error(key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) config_error(key + ": must be finite");
  return x;
}

std::int64_t integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) config_error(key + ": expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t count(const json& v, const std::string& key) {
  const auto n = integer(v, key);
  if (n < 0) config_error(key + ": must be >= 0");
  return static_cast<std::uint64_t>(n);
}

bool boolean(const json& v, const std::string& key) {
  if (!v.is_boolean()) config_error(key + ": expected true or false");
  return v.get<bool>();
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) config_error(key + ": expected a string");
  return v.get<std::string>();
}

template <typename Fn>
void each_key(const json& obj, const std::string& section, Fn&& fn) {
  if (!obj.is_object()) config_error(section + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    const std::string path = section.empty() ? key : section + "." + key;
    if (!fn(key, value, path)) config_error("unknown key '" + path + "'");
  }
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return out;
}

struct Point {
  double x = 0.0;
  double mean = 0.0;
  double sampled = 0.0;
  double err = 0.0;
};

// Points are evaluated in any order but stored by index.
template <typename Fn>
std::vector<Point> evaluate_points(std::size_t n, int workers, Fn&& fn) {
  std::vector<Point> out(n);
  const auto pool = static_cast<std::size_t>(std::clamp<long long>(workers, 1, static_cast<long long>(std::max<std::size_t>(n, 1))));
  if (pool <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < pool; ++w)
    threads.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          out[i] = fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

Point binomial_point(double x, double p, const ScenarioConfig& cfg, std::uint64_t index) {
  p = std::clamp(p, 0.0, 1.0);
  Rng rng = make_rng(cfg.seed, index);
  const double shots = static_cast<double>(cfg.shots);
  return {x, p, sample_fraction(p, cfg.shots, rng), std::sqrt(p * (1.0 - p) / shots)};
}

ScanResult assemble(const ScenarioConfig& cfg, std::string x_label, std::string value_label,
                    const std::vector<Point>& points) {
  ScanResult r;
  r.scenario = cfg.scenario;
  r.x_label = std::move(x_label);
  r.value_label = std::move(value_label);
  r.config_hash = cfg.config_hash;
  r.seed = cfg.seed;
  r.shots = cfg.shots;
  for (const auto& p : points) {
    r.x.push_back(p.x);
    r.value_mean.push_back(p.mean);
    r.value_sampled.push_back(p.sampled);
    r.stderr_.push_back(p.err);
  }
  return r;
}

std::size_t channel_index(const SimulationResult& r, int channel) {
  for (std::size_t i = 0; i < r.channels.size(); ++i)
    if (r.channels[i] == channel) return i;
  fail(ErrorKind::InvalidArgument, "channel missing from simulation result");
}

std::vector<int> default_pulses() { return {1, 2, 4, 8, 16, 32}; }

double crosstalk_pi_time(const ScenarioConfig& cfg) {
  if (!(cfg.ctx.f_ct > 0.0)) config_error("context.f_ct must be > 0 for this scenario");
  return kPi / (cfg.ctx.f_ct * cfg.ctx.omega0);
}

void range_or(const ScenarioConfig& cfg, double a, double b, int n, double& start, double& stop, int& points) {
  start = cfg.range_set ? cfg.start : a;
  stop = cfg.range_set ? cfg.stop : b;
  points = cfg.points > 0 ? cfg.points : n;
}

}  // namespace

Scenario parse_scenario(const std::string& name) {
  for (const auto& s : kScenarios)
    if (name == s.name) return s.id;
  config_error("unknown scenario '" + name + "'");
}

const char* scenario_name(Scenario s) {
  for (const auto& e : kScenarios)
    if (e.id == s) return e.name;
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "none") return Method::None;
  if (name == "pcc") return Method::Pcc;
  if (name == "sk1") return Method::Sk1;
  if (name == "quad") return Method::Quad;
  config_error("unknown method '" + name + "'");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::None: return "none";
    case Method::Pcc: return "pcc";
    case Method::Sk1: return "sk1";
    case Method::Quad: return "quad";
  }
  return "unknown";
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ScenarioConfig parse_config(const std::string& json_text, Scenario scenario) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  ScenarioConfig cfg;
  cfg.scenario = scenario;
  cfg.config_hash = fnv1a(doc.dump());
  std::optional<double> f_eff;
  bool setting_given = false;
  double f_comp = cfg.compensation.f_comp();
  double delta_phi = cfg.compensation.delta_phi();

  each_key(doc, "", [&](const std::string& key, const json& v, const std::string& path) {
    if (key == "scenario") {
      if (parse_scenario(text(v, path)) != scenario)
        config_error("config is for scenario '" + text(v, path) + "', not '" + scenario_name(scenario) + "'");
    } else if (key == "method") {
      cfg.method = parse_method(text(v, path));
    } else if (key == "seed") {
      cfg.seed = count(v, path);
    } else if (key == "shots") {
      cfg.shots = count(v, path);
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(integer(v, path));
    } else if (key == "output") {
      cfg.output = text(v, path);
    } else if (key == "context") {
      each_key(v, path, [&](const std::string& k, const json& x, const std::string& p) {
        auto& c = cfg.ctx;
        if (k == "omega0_rad_per_s") c.omega0 = num(x, p);
        else if (k == "f_ct") c.f_ct = num(x, p);
        else if (k == "delta_ct_rad_per_s") c.delta_ct = num(x, p);
        else if (k == "pol_overlap") c.pol_overlap = num(x, p);
        else if (k == "stark_shift_rad_per_s") c.stark_shift = num(x, p);
        else if (k == "compensation_gain") c.compensation_gain = num(x, p);
        else if (k == "compensation_phase_offset_rad") c.compensation_phase_offset = num(x, p);
        else return false;
        return true;
      });
    } else if (key == "compensation") {
      each_key(v, path, [&](const std::string& k, const json& x, const std::string& p) {
        if (k == "f_comp") { f_comp = num(x, p); setting_given = true; }
        else if (k == "delta_phi_rad") { delta_phi = num(x, p); setting_given = true; }
        else if (k == "f_eff") f_eff = num(x, p);
        else return false;
        return true;
      });
    } else if (key == "scan") {
      each_key(v, path, [&](const std::string& k, const json& x, const std::string& p) {
        if (k == "pulses") {
          if (!x.is_array()) config_error(p + ": expected an array");
          cfg.pulses.clear();
          for (const auto& e : x) cfg.pulses.push_back(static_cast<int>(integer(e, p)));
        } else if (k == "ratios") {
          if (!x.is_array()) config_error(p + ": expected an array");
          cfg.ratios.clear();
          for (const auto& e : x) cfg.ratios.push_back(num(e, p));
        } else if (k == "start") { cfg.start = num(x, p); cfg.range_set = true; }
        else if (k == "stop") { cfg.stop = num(x, p); cfg.range_set = true; }
        else if (k == "points") cfg.points = static_cast<int>(integer(x, p));
        else if (k == "periods") cfg.periods = static_cast<int>(integer(x, p));
        else if (k == "channel") cfg.channel = text(x, p);
        else if (k == "duration_min") cfg.duration_min = num(x, p);
        else if (k == "dt_min") cfg.dt_min = num(x, p);
        else if (k == "mitigation") cfg.mitigation = boolean(x, p);
        else if (k == "beatnote_sigma_rad") cfg.beatnote_sigma_rad = num(x, p);
        else if (k == "sample_interval_s") cfg.sample_interval_s = num(x, p);
        else if (k == "measure_s") cfg.measure_s = num(x, p);
        else if (k == "settle_tau") cfg.settle_tau = num(x, p);
        else if (k == "component") cfg.component = text(x, p);
        else if (k == "lit_core") cfg.lit_core = static_cast<int>(integer(x, p));
        else if (k == "relative_phase_rad") cfg.relative_phase_rad = num(x, p);
        else return false;
        return true;
      });
    } else if (key == "noise") {
      cfg.noise = parse_noise_presets(v.dump());
    } else if (key == "device") {
      each_key(v, path, [&](const std::string& k, const json& x, const std::string& p) {
        auto& d = cfg.device;
        if (k == "cores") d.cores = static_cast<int>(integer(x, p));
        else if (k == "pitch_um") d.pitch_um = num(x, p);
        else if (k == "waist_um") d.waist_um = num(x, p);
        else if (k == "wavelength_nm") d.wavelength_nm = num(x, p);
        else if (k == "numerical_aperture") d.numerical_aperture = num(x, p);
        else if (k == "leakage") d.leakage = num(x, p);
        else if (k == "grid_half_width_um") d.grid_half_width_um = num(x, p);
        else if (k == "grid_step_um") d.grid_step_um = num(x, p);
        else if (k == "map_csv") cfg.device_map_csv = text(x, p);
        else return false;
        return true;
      });
    } else if (key == "calibration") {
      each_key(v, path, [&](const std::string& k, const json& x, const std::string& p) {
        if (k == "phase_periods") cfg.chain.phase_periods = static_cast<int>(integer(x, p));
        else if (k == "phase_points") cfg.chain.phase_points = static_cast<int>(integer(x, p));
        else if (k == "stark") cfg.chain.stark = boolean(x, p);
        else return false;
        return true;
      });
    } else {
      return false;
    }
    return true;
  });

  try {
    cfg.ctx.validate();
    if (f_eff) {
      if (setting_given) config_error("compensation: give either f_eff or (f_comp, delta_phi_rad), not both");
      if (!(cfg.ctx.f_ct > 0.0) || *f_eff < 0.0 || *f_eff > cfg.ctx.f_ct)
        config_error("compensation.f_eff must lie in [0, f_ct]");
      // Residual of an amplitude error at the ideal phase.
      f_comp = 1.0 - *f_eff / cfg.ctx.f_ct;
      delta_phi = kPi;
    }
    cfg.compensation = CompensationSetting(f_comp, delta_phi);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Configuration) throw;
    config_error(e.what());
  }
  if (cfg.shots < 1) config_error("shots must be >= 1");
  if (cfg.workers < 1) config_error("workers must be >= 1");
  if (cfg.points < 0) config_error("scan.points must be >= 1");
  if (cfg.range_set && !(cfg.stop > cfg.start)) config_error("scan: stop must exceed start");
  if (cfg.periods < 1) config_error("scan.periods must be >= 1");
  for (int n : cfg.pulses)
    if (n < 1) config_error("scan.pulses entries must be >= 1");
  for (double r : cfg.ratios)
    if (!(r > 0.0 && r <= 1.0)) config_error("scan.ratios entries must lie in (0, 1]");
  if (cfg.channel != "spectator" && cfg.channel != "target") config_error("scan.channel must be target or spectator");
  if (cfg.component != "total" && cfg.component != "device" && cfg.component != "diffraction" &&
      cfg.component != "gaussian")
    config_error("scan.component must be total, device, diffraction or gaussian");
  if (!(cfg.dt_min > 0.0) || cfg.duration_min < 0.0) config_error("scan: dt_min must be > 0, duration_min >= 0");
  if (cfg.beatnote_sigma_rad < 0.0) config_error("scan.beatnote_sigma_rad must be >= 0");
  if (!(cfg.sample_interval_s > 0.0) || cfg.measure_s < cfg.sample_interval_s)
    config_error("scan: need 0 < sample_interval_s <= measure_s");
  if (cfg.settle_tau < 0.0) config_error("scan.settle_tau must be >= 0");
  cfg.chain.shots = cfg.shots;
  return cfg;
}

ScenarioConfig load_config(const std::string& path, Scenario scenario) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), scenario);
}

PulseSequence pi_gate(Method method, const CrosstalkContext& ctx, const CompensationSetting& setting) {
  switch (method) {
    case Method::None: return square_pi(ctx.omega0, 0.0);
    case Method::Pcc: return with_pcc(square_pi(ctx.omega0, 0.0), ctx, setting);
    case Method::Sk1: return sk1(kPi, 0.0, ctx.omega0);
    case Method::Quad: return quadrilateral_pi(ctx.omega0);
  }
  config_error("unknown method");
}

double spectator_error(Method method, const CrosstalkContext& ctx, const CompensationSetting& setting, int pulses,
                       bool ramsey) {
  const auto seq = repeat(pi_gate(method, ctx, setting), pulses);
  const Unitary2 half = axis_rotation(kPi / 2.0, 0.0);
  std::vector<QubitState> initial;
  for (const auto& c : seq.channels)
    initial.push_back(c.channel == kSpectatorChannel && ramsey ? QubitState(half * ket0()) : ket0());
  const auto r = simulate(seq, ctx, initial);
  const QubitState psi = r.final_states[channel_index(r, kSpectatorChannel)];
  return ramsey ? excited_population(QubitState(half.adjoint() * psi)) : excited_population(psi);
}

namespace {

ScanResult run_pulse_error(const ScenarioConfig& cfg, bool ramsey) {
  const auto pulses = cfg.pulses.empty() ? default_pulses() : cfg.pulses;
  const auto points = evaluate_points(pulses.size(), cfg.workers, [&](std::size_t i) {
    const double p = spectator_error(cfg.method, cfg.ctx, cfg.compensation, pulses[i], ramsey);
    return binomial_point(pulses[i], p, cfg, i);
  });
  return assemble(cfg, "pulses", ramsey ? "spectator_ramsey_error" : "spectator_excited_population", points);
}

}  // namespace

ScanResult run_x_error(const ScenarioConfig& cfg) { return run_pulse_error(cfg, false); }
ScanResult run_z_error(const ScenarioConfig& cfg) { return run_pulse_error(cfg, true); }

ScanResult run_phase_scan(const ScenarioConfig& cfg) {
  const double t = 2.0 * cfg.periods * crosstalk_pi_time(cfg);
  double a, b;
  int n;
  range_or(cfg, 0.0, 2.0 * kPi, 40, a, b, n);
  // The default range is a full turn without its duplicate endpoint.
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = cfg.range_set ? linspace(a, b, n)[i] : 2.0 * kPi * i / n;
  const auto gate = square_pulse(cfg.ctx.omega0, cfg.ctx.omega0 * t, 0.0);
  const double f = cfg.compensation.f_comp();
  const auto points = evaluate_points(xs.size(), cfg.workers, [&](std::size_t i) {
    const auto seq = with_pcc(gate, cfg.ctx, CompensationSetting(f, xs[i]));
    const auto r = simulate(seq, cfg.ctx, {ket0(), ket0()});
    return binomial_point(xs[i], r.excited_population[channel_index(r, kSpectatorChannel)], cfg, i);
  });
  return assemble(cfg, "delta_phi_rad", "spectator_excited_population", points);
}

ScanResult run_rabi_scan(const ScenarioConfig& cfg) {
  if (cfg.method != Method::None && cfg.method != Method::Pcc) config_error("rabi-scan supports methods none and pcc");
  const bool spectator = cfg.channel == "spectator";
  const double t_end = spectator ? 4.0 * crosstalk_pi_time(cfg) : 4.0 * kPi / cfg.ctx.omega0;
  double a, b;
  int n;
  range_or(cfg, 0.0, t_end, 81, a, b, n);
  const auto xs = linspace(a, b, n);
  const auto points = evaluate_points(xs.size(), cfg.workers, [&](std::size_t i) {
    if (xs[i] < 0.0) config_error("rabi-scan times must be >= 0");
    auto seq = square_pulse(cfg.ctx.omega0, cfg.ctx.omega0 * xs[i], 0.0);
    if (cfg.method == Method::Pcc) seq = with_pcc(seq, cfg.ctx, cfg.compensation);
    const auto r = simulate(seq, cfg.ctx, {ket0(), ket0()});
    const int ch = spectator ? kSpectatorChannel : kTargetChannel;
    return binomial_point(xs[i], r.excited_population[channel_index(r, ch)], cfg, i);
  });
  return assemble(cfg, "time_s", spectator ? "spectator_excited_population" : "target_excited_population", points);
}

ScanResult run_amplitude_scan(const ScenarioConfig& cfg) {
  double a, b;
  int n;
  range_or(cfg, 0.0, 1.2, 121, a, b, n);
  const auto xs = linspace(a, b, n);
  const Method m = cfg.method == Method::Pcc ? Method::None : cfg.method;
  const auto gate = pi_gate(m, cfg.ctx, cfg.compensation);
  const ChannelPulse& target = *gate.find(kTargetChannel);
  const auto points = evaluate_points(xs.size(), cfg.workers, [&](std::size_t i) {
    if (xs[i] < 0.0) config_error("amplitude-scan values must be >= 0");
    const QubitState psi = channel_unitary(target, xs[i]) * ket0();
    return binomial_point(xs[i], excited_population(psi), cfg, i);
  });
  return assemble(cfg, "rabi_over_omega0", "excited_population", points);
}

ScanResult run_drift_monitor(const ScenarioConfig& cfg) {
  const auto trace = sample_slow_drift(cfg.noise.drift, cfg.duration_min, cfg.dt_min, cfg.seed);
  const double err = 1.0 / std::sqrt(static_cast<double>(cfg.shots));
  const auto points = evaluate_points(trace.size(), cfg.workers, [&](std::size_t i) {
    // Mid-fringe probe: P = (1 + sin phi) / 2.
    Rng rng = make_rng(cfg.seed, i + 1);
    const double p = sample_fraction(ramsey_probability(trace[i] + kPi / 2.0), cfg.shots, rng);
    return Point{cfg.dt_min * static_cast<double>(i), trace[i], std::asin(std::clamp(2.0 * p - 1.0, -1.0, 1.0)), err};
  });
  return assemble(cfg, "time_min", "phase_rad", points);
}

ScanResult run_duty_cycle_sweep(const ScenarioConfig& cfg) {
  std::vector<double> ratios = cfg.ratios;
  if (ratios.empty())
    for (int i = 0; i <= 12; ++i) ratios.push_back(std::pow(10.0, -3.0 + 0.25 * i));
  DutyCycleSchedule schedule;
  schedule.mitigation = cfg.mitigation;
  const auto& model = cfg.noise.aom;
  const auto points = evaluate_points(ratios.size(), cfg.workers, [&](std::size_t i) {
    const double rate = duty_cycle_drift_rate(model, schedule, ratios[i], cfg.settle_tau, cfg.measure_s);
    const auto trace =
        duty_cycle_phase_trace(model, schedule, ratios[i], cfg.settle_tau, cfg.measure_s, cfg.sample_interval_s);
    // Beatnote readings are wrapped; unwrap before the straight-line fit.
    const std::size_t m = trace.time_s.size();
    std::vector<double> y(m);
    const std::uint64_t point_seed = derive_seed(cfg.seed, i);
    for (std::size_t j = 0; j < m; ++j) {
      y[j] = beatnote_phase_measurement(cfg.noise.beatnote, trace.phase_rad[j], cfg.beatnote_sigma_rad,
                                        derive_seed(point_seed, j));
      if (j > 0) y[j] = y[j - 1] + wrap_phase(y[j] - y[j - 1]);
    }
    double tm = 0, ym = 0;
    for (std::size_t j = 0; j < m; ++j) {
      tm += trace.time_s[j];
      ym += y[j];
    }
    tm /= m;
    ym /= m;
    double sxx = 0, sxy = 0;
    for (std::size_t j = 0; j < m; ++j) {
      sxx += std::pow(trace.time_s[j] - tm, 2);
      sxy += (trace.time_s[j] - tm) * (y[j] - ym);
    }
    const double slope = sxy / sxx;
    double sse = 0;
    for (std::size_t j = 0; j < m; ++j) sse += std::pow(y[j] - ym - slope * (trace.time_s[j] - tm), 2);
    const double err = m > 2 ? std::sqrt(sse / static_cast<double>(m - 2) / sxx) : 0.0;
    return Point{ratios[i], rate, slope, err};
  });
  return assemble(cfg, "duty_cycle_ratio", "drift_rate_rad_per_s", points);
}

ScanResult run_beam_profile(const ScenarioConfig& cfg) {
  const BeamProfile profile =
      cfg.device_map_csv.empty() ? default_device_profile(cfg.device) : load_device_map_csv(cfg.device_map_csv, cfg.device);
  const std::size_t lit = cfg.lit_core < 0 ? profile.core_count() / 2 : static_cast<std::size_t>(cfg.lit_core);
  if (lit >= profile.core_count()) config_error("scan.lit_core out of range");
  std::vector<Point> points;

  if (cfg.component == "total") {
    // Crosstalk onto every other core.
    const Eigen::VectorXd diffraction = diffraction_on_profile(profile, lit);
    for (std::size_t k = 0; k < profile.core_count(); ++k) {
      if (k == lit) continue;
      const double sep = profile.core_positions_um[k] - profile.core_positions_um[lit];
      const auto r =
          total_crosstalk_ratio(profile, diffraction, sep, cfg.ctx.pol_overlap, lit, cfg.relative_phase_rad);
      points.push_back({sep, r.intensity_ratio, r.intensity_ratio, 0.0});
    }
    return assemble(cfg, "separation_um", "intensity_ratio", points);
  }

  double a, b;
  int n;
  range_or(cfg, -15.0, 15.0, 301, a, b, n);
  const auto xs = linspace(a, b, n);
  Eigen::VectorXd values(n);
  if (cfg.component == "gaussian") {
    values = gaussian_profile(profile.waist_um, xs);
  } else if (cfg.component == "diffraction") {
    values = clipped_focus_profile(profile.waist_um, profile.wavelength_nm, profile.numerical_aperture, xs);
  } else {
    const Eigen::VectorXd none = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(profile.grid_um.size()));
    for (int i = 0; i < n; ++i) values[i] = total_crosstalk_ratio(profile, none, xs[i], 1.0, lit).intensity_ratio;
  }
  for (int i = 0; i < n; ++i) points.push_back({xs[i], values[i], values[i], 0.0});
  return assemble(cfg, "position_um", "relative_intensity", points);
}

ScanResult run_scenario(const ScenarioConfig& cfg) {
  switch (cfg.scenario) {
    case Scenario::XError: return run_x_error(cfg);
    case Scenario::ZError: return run_z_error(cfg);
    case Scenario::PhaseScan: return run_phase_scan(cfg);
    case Scenario::RabiScan: return run_rabi_scan(cfg);
    case Scenario::AmplitudeScan: return run_amplitude_scan(cfg);
    case Scenario::DriftMonitor: return run_drift_monitor(cfg);
    case Scenario::DutyCycleSweep: return run_duty_cycle_sweep(cfg);
    case Scenario::BeamProfile: return run_beam_profile(cfg);
    case Scenario::Calibrate: break;
  }
  config_error("calibrate does not produce a scan");
}

std::string to_csv(const ScanResult& r) {
  std::string out;
  char buf[128];
  auto line = [&](const char* key, const std::string& value) { out += "# " + std::string(key) + ": " + value + "\n"; };
  line("scenario", scenario_name(r.scenario));
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(r.config_hash));
  line("config_hash", buf);
  line("seed", std::to_string(r.seed));
  line("shots", std::to_string(r.shots));
  line("build", build_version());
  line("x", r.x_label);
  line("value", r.value_label);
  out += "x,value_mean,value_sampled,stderr\n";
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.x[i], r.value_mean[i], r.value_sampled[i],
                  r.stderr_[i]);
    out += buf;
  }
  return out;
}

const char* build_version() { return XTALK_GIT_DESCRIBE; }

}  // namespace xtalk
