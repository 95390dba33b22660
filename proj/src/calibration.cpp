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

#include "xtalk/calibration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>

#include "json.hpp"
#include "xtalk/pulses.hpp"
#include "xtalk/random.hpp"

namespace xtalk {

namespace {

constexpr double kPi = std::numbers::pi;

double noise_scale(std::uint64_t shots) { return shots > 0 ? std::sqrt(0.25 / static_cast<double>(shots)) : 0.0; }

// Population of `channel` after `seq`, both qubits starting in |0>.
double measured_population(PulseSequence seq, int channel, std::uint64_t shots, std::uint64_t seed,
                           std::uint64_t index, const CrosstalkContext& ctx) {
  seq.shots = shots;
  seq.seed = seed;
  std::vector<QubitState> initial(seq.channels.size(), ket0());
  const auto r = simulate(seq, ctx, initial, {}, index);
  for (std::size_t i = 0; i < r.channels.size(); ++i)
    if (r.channels[i] == channel) return shots > 0 ? r.sampled_population[i] : r.excited_population[i];
  fail(ErrorKind::InvalidArgument, "channel missing from sequence");
}

PulseSequence tone_only(const CrosstalkContext& ctx, double f_set, double t) {
  PulseSequence seq;
  PulseSegment idle;
  idle.duration = t;
  PulseSegment tone;
  tone.rabi = f_set * ctx.f_ct * ctx.omega0;
  tone.duration = t;
  seq.channels.push_back({kTargetChannel, {idle}});
  seq.channels.push_back({kSpectatorChannel, {tone}});
  return seq;
}

// Fits c + a sin^2(w t / 2) after a grid search on w with (c, a) solved
// linearly at each grid point.
PiTimeMeasurement fit_flop(const std::vector<double>& t, const std::vector<double>& p, double w_guess,
                           std::uint64_t shots) {
  const std::size_t m = t.size();
  auto linear = [&](double w, double& c, double& a) {
    double s1 = 0, s2 = 0, y1 = 0, ys = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const double s = std::pow(std::sin(0.5 * w * t[k]), 2);
      s1 += s;
      s2 += s * s;
      y1 += p[k];
      ys += p[k] * s;
    }
    const double det = static_cast<double>(m) * s2 - s1 * s1;
    if (std::abs(det) < 1e-300) {
      c = y1 / static_cast<double>(m);
      a = 0.0;
    } else {
      a = (static_cast<double>(m) * ys - s1 * y1) / det;
      c = (y1 - a * s1) / static_cast<double>(m);
    }
    double sse = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double r = c + a * std::pow(std::sin(0.5 * w * t[k]), 2) - p[k];
      sse += r * r;
    }
    return sse;
  };
  double best_w = w_guess, best_c = 0, best_a = 0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 400; ++i) {
    const double w = w_guess * (0.5 + i / 400.0);
    double c, a;
    const double sse = linear(w, c, a);
    if (sse < best) {
      best = sse;
      best_w = w;
      best_c = c;
      best_a = a;
    }
  }
  const double floor = shots > 0 ? 5.0 * noise_scale(shots) : 1e-12;
  if (!(best_a > floor))
    fail(ErrorKind::LowSignal, "flop contrast " + std::to_string(best_a) + " below 5x shot-noise floor");

  ResidualFn res = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(m);
    for (std::size_t k = 0; k < m; ++k) r[k] = x[0] + x[1] * std::pow(std::sin(0.5 * x[2] * t[k]), 2) - p[k];
    return r;
  };
  Eigen::Vector3d x0(best_c, best_a, best_w), lo(-0.5, 0.0, 0.25 * w_guess), hi(1.5, 2.0, 2.0 * w_guess);
  LeastSquaresOptions opt;
  opt.failure_rms = 0.1 + 5.0 * noise_scale(shots);
  const auto fit = gauss_newton(res, x0, lo, hi, opt);
  PiTimeMeasurement out;
  out.offset = fit.parameters[0];
  out.contrast = fit.parameters[1];
  out.t_pi = kPi / fit.parameters[2];
  out.fit = fit.diagnostics();
  return out;
}

template <typename Builder>
PiTimeMeasurement measure_flop(const CrosstalkContext& ctx, Builder&& build, double t_guess, std::uint64_t shots,
                               std::uint64_t seed, const FlopScan& scan) {
  if (scan.points_per_period < 4 || scan.periods < 1) fail(ErrorKind::InvalidArgument, "flop scan too coarse");
  const int n = scan.points_per_period * scan.periods;
  const double t_max = 2.0 * t_guess * scan.periods;
  std::vector<double> t(n), p(n);
  for (int k = 0; k < n; ++k) {
    t[k] = t_max * (k + 1) / n;
    p[k] = measured_population(build(t[k]), kSpectatorChannel, shots, seed, static_cast<std::uint64_t>(k), ctx);
  }
  return fit_flop(t, p, kPi / t_guess, shots);
}

}  // namespace

PiTimeMeasurement measure_pi_time(const CrosstalkContext& ctx, std::uint64_t shots, std::uint64_t seed,
                                  const FlopScan& scan) {
  ctx.validate();
  // Without a nominal ratio the scan covers 100 target pi times.
  const double t_guess = ctx.f_ct > 0.0 ? kPi / (ctx.f_ct * ctx.omega0) : 100.0 * kPi / ctx.omega0;
  auto build = [&](double t) { return square_pulse(ctx.omega0, ctx.omega0 * t, 0.0); };
  return measure_flop(ctx, build, t_guess, shots, seed, scan);
}

AmplitudeCalibration calibrate_amplitude(const CrosstalkContext& ctx, double t_pi_ct, std::uint64_t shots,
                                         std::uint64_t seed, double lo, double hi, double tolerance) {
  ctx.validate();
  if (!(t_pi_ct > 0.0) || !std::isfinite(t_pi_ct)) fail(ErrorKind::InvalidArgument, "t_pi_ct must be > 0");
  if (!(lo > 0.0 && hi > lo)) fail(ErrorKind::InvalidArgument, "amplitude search interval invalid");
  if (!(ctx.f_ct > 0.0)) fail(ErrorKind::InvalidArgument, "amplitude calibration needs f_ct > 0");
  AmplitudeCalibration out;
  auto mismatch = [&](double f) {
    auto build = [&](double t) { return tone_only(ctx, f, t); };
    const auto m = measure_flop(ctx, build, t_pi_ct / f, shots, derive_seed(seed, out.evaluations++), FlopScan{});
    return m.t_pi - t_pi_ct;
  };
  // A tone too weak or too strong to flop inside the scan cannot bracket.
  auto endpoint = [&](double f) {
    try {
      return mismatch(f);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::LowSignal) throw;
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  double g_lo = endpoint(lo);
  const double g_hi = endpoint(hi);
  if (!(g_lo > 0.0 && g_hi < 0.0))
    fail(ErrorKind::Configuration, "amplitude search interval does not bracket the crosstalk pi time");
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    const double g = mismatch(mid);
    if (g > 0.0) {
      lo = mid;
      g_lo = g;
    } else {
      hi = mid;
    }
  }
  out.f_comp_star = 0.5 * (lo + hi);
  out.residual_floor = std::sqrt(std::max(0.0, 1.0 - ctx.pol_overlap * ctx.pol_overlap));
  return out;
}

double phase_scan_model(double delta_phi, double phi_star, double magnitude, int periods) {
  const double m2 = 1.0 + magnitude * magnitude - 2.0 * magnitude * std::cos(delta_phi - phi_star);
  return std::pow(std::sin(periods * kPi * std::sqrt(std::max(0.0, m2))), 2);
}

PhaseCalibration calibrate_phase(const CrosstalkContext& ctx, double f_comp, double t_pi_ct, int periods,
                                 std::uint64_t shots, std::uint64_t seed, int points) {
  ctx.validate();
  if (periods < 1) fail(ErrorKind::InvalidArgument, "phase calibration needs n >= 1");
  if (points < 8) fail(ErrorKind::InvalidArgument, "phase scan needs at least 8 points");
  if (!(t_pi_ct > 0.0)) fail(ErrorKind::InvalidArgument, "t_pi_ct must be > 0");
  PhaseCalibration out;
  const double t = 2.0 * periods * t_pi_ct;
  const auto gate = square_pulse(ctx.omega0, ctx.omega0 * t, 0.0);
  for (int k = 0; k < points; ++k) {
    const double dphi = 2.0 * kPi * k / points;
    out.scan_phase.push_back(dphi);
    out.scan_population.push_back(measured_population(with_pcc(gate, ctx, CompensationSetting(f_comp, dphi)),
                                                      kSpectatorChannel, shots, seed, k, ctx));
  }
  const auto& x = out.scan_phase;
  const auto& y = out.scan_population;
  auto sse_at = [&](double phi, double mag) {
    double s = 0.0;
    for (int k = 0; k < points; ++k) s += std::pow(phase_scan_model(x[k], phi, mag, periods) - y[k], 2);
    return s;
  };
  // Coarse search first: the model has a second, shallower basin half a
  // turn away from the minimum.
  double phi0 = kPi, mag0 = f_comp, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 360; ++i)
    for (int j = 0; j <= 20; ++j) {
      const double phi = 2.0 * kPi * i / 360.0;
      const double mag = 0.5 + 0.05 * j;
      const double s = sse_at(phi, mag);
      if (s < best) {
        best = s;
        phi0 = phi;
        mag0 = mag;
      }
    }
  ResidualFn res = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(points);
    for (int k = 0; k < points; ++k) r[k] = phase_scan_model(x[k], p[0], p[1], periods) - y[k];
    return r;
  };
  LeastSquaresOptions opt;
  opt.failure_rms = 0.1 + 5.0 * noise_scale(shots);
  const auto fit = gauss_newton(res, Eigen::Vector2d(phi0, mag0), Eigen::Vector2d(phi0 - kPi / 2, 0.0),
                                Eigen::Vector2d(phi0 + kPi / 2, 3.0), opt);
  out.delta_phi_star = std::fmod(fit.parameters[0], 2.0 * kPi);
  if (out.delta_phi_star < 0.0) out.delta_phi_star += 2.0 * kPi;
  out.magnitude = fit.parameters[1];
  out.rms = fit.rms;
  out.fit = fit.diagnostics();
  return out;
}

StarkShiftCalibration calibrate_stark_shift(const CrosstalkContext& ctx, std::uint64_t shots, std::uint64_t seed,
                                            int points, double span) {
  ctx.validate();
  if (points < 5 || !(span > 0.0)) fail(ErrorKind::InvalidArgument, "Stark scan needs >= 5 points and span > 0");
  const double w0 = ctx.omega0;
  const double t = kPi / w0;
  std::vector<double> det(points), pop(points);
  for (int k = 0; k < points; ++k) {
    det[k] = -span * w0 + 2.0 * span * w0 * k / (points - 1);
    PulseSegment seg;
    seg.rabi = w0;
    seg.detuning = det[k] - ctx.stark_shift;
    seg.duration = t;
    PulseSequence seq;
    seq.channels.push_back({kTargetChannel, {seg}});
    seq.channels.push_back({kSpectatorChannel, {}});
    pop[k] = measured_population(seq, kTargetChannel, shots, seed, k, ctx);
  }
  const auto peak = std::max_element(pop.begin(), pop.end()) - pop.begin();
  if (peak == 0 || peak == points - 1) fail(ErrorKind::Range, "Stark scan range does not contain the resonance");

  auto line = [&](double x) {
    const double g2 = w0 * w0 + x * x;
    return w0 * w0 / g2 * std::pow(std::sin(0.5 * std::sqrt(g2) * t), 2);
  };
  double s0 = det[peak], a0 = 1.0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 800; ++i) {
    const double s = -span * w0 + 2.0 * span * w0 * i / 800.0;
    double num = 0, den = 0;
    for (int k = 0; k < points; ++k) {
      num += pop[k] * line(det[k] - s);
      den += line(det[k] - s) * line(det[k] - s);
    }
    const double a = den > 0 ? num / den : 0.0;
    double sse = 0;
    for (int k = 0; k < points; ++k) sse += std::pow(a * line(det[k] - s) - pop[k], 2);
    if (sse < best) {
      best = sse;
      s0 = s;
      a0 = a;
    }
  }
  ResidualFn res = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(points);
    for (int k = 0; k < points; ++k) r[k] = p[1] * line(det[k] - p[0] * w0) - pop[k];
    return r;
  };
  // Shift is fitted in units of omega0 to keep the Jacobian well scaled.
  LeastSquaresOptions opt;
  opt.failure_rms = 0.1 + 5.0 * noise_scale(shots);
  const auto fit = gauss_newton(res, Eigen::Vector2d(s0 / w0, a0), Eigen::Vector2d(-span, 0.0),
                                Eigen::Vector2d(span, 2.0), opt);
  StarkShiftCalibration out;
  out.shift = fit.parameters[0] * w0;
  out.delta_ct = -out.shift;
  out.fit = fit.diagnostics();
  return out;
}

double recalibration_interval(double drift_rate_rad_per_min, double suppression_target) {
  if (!(drift_rate_rad_per_min > 0.0) || !std::isfinite(drift_rate_rad_per_min))
    fail(ErrorKind::InvalidArgument, "drift rate must be > 0");
  if (!(suppression_target > 0.0 && suppression_target < 1.0))
    fail(ErrorKind::InvalidArgument, "suppression target must lie in (0, 1)");
  return phase_tolerance(suppression_target) / drift_rate_rad_per_min;
}

void FitModel::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i])
      fail(ErrorKind::InvalidArgument, "fit bounds must be finite and ordered");
    if (parameters[i] < lower[i] || parameters[i] > upper[i])
      fail(ErrorKind::InvalidArgument, "fit start point outside bounds");
  }
}

double FitModel::evaluate(int pulses, const std::array<double, 3>& p) const {
  const double f = p[0], d = p[1];
  if (kind == FitModelKind::Eq7Population) {
    const double g2 = f * f + d * d;
    if (g2 == 0.0) return p[2];
    return f * f / g2 * std::pow(std::sin(0.5 * kPi * pulses * std::sqrt(g2)), 2) + p[2];
  }
  // Dimensionless time: one unit is 1 / omega0.
  static const ChannelPulse sk1_pi = sk1(kPi, 0.0, 1.0).channels.front();
  const Unitary2 u = channel_unitary(sk1_pi, f, d);
  QubitState psi = ket0();
  for (int i = 0; i < pulses; ++i) psi = xtalk::apply(u, psi);
  return excited_population(psi) + p[2];
}

CrosstalkFit fit_crosstalk_model(const std::vector<std::pair<int, double>>& data, const FitModel& model) {
  model.validate();
  if (data.size() < 5) fail(ErrorKind::InvalidArgument, "crosstalk fit needs at least 5 points");
  for (const auto& [n, p] : data)
    if (n < 1 || !std::isfinite(p)) fail(ErrorKind::InvalidArgument, "crosstalk data must have N >= 1 and finite values");
  std::vector<int> idx;
  for (int i = 0; i < 3; ++i)
    if (model.free[i]) idx.push_back(i);
  if (idx.empty()) fail(ErrorKind::InvalidArgument, "no free parameters");
  const auto k = static_cast<Eigen::Index>(idx.size());
  auto full = [&](const Eigen::VectorXd& x) {
    auto p = model.parameters;
    for (Eigen::Index i = 0; i < k; ++i) p[idx[i]] = x[i];
    return p;
  };
  ResidualFn res = [&](const Eigen::VectorXd& x) {
    const auto p = full(x);
    Eigen::VectorXd r(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) r[i] = model.evaluate(data[i].first, p) - data[i].second;
    return r;
  };
  Eigen::VectorXd x0(k), lo(k), hi(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    x0[i] = model.parameters[idx[i]];
    lo[i] = model.lower[idx[i]];
    hi[i] = model.upper[idx[i]];
  }
  LeastSquaresOptions opt;
  opt.tolerance = 1e-20;
  const auto fit = gauss_newton(res, x0, lo, hi, opt);
  CrosstalkFit out;
  out.model = model;
  out.model.parameters = full(fit.parameters);
  out.rms = fit.rms;
  out.covariance = fit.covariance;
  out.fit = fit.diagnostics();
  return out;
}

CalibrationReport run_calibration_chain(const CrosstalkContext& ctx, const ChainOptions& options) {
  ctx.validate();
  CalibrationReport report;
  if (options.stark) report.stark = calibrate_stark_shift(ctx, options.shots, derive_seed(options.seed, 0));
  report.pi_time = measure_pi_time(ctx, options.shots, derive_seed(options.seed, 1));
  report.amplitude = calibrate_amplitude(ctx, report.pi_time.t_pi, options.shots, derive_seed(options.seed, 2));
  report.phase = calibrate_phase(ctx, report.amplitude.f_comp_star, report.pi_time.t_pi, options.phase_periods,
                                 options.shots, derive_seed(options.seed, 3), options.phase_points);
  auto& r = report.result;
  r.t_pi_ct = report.pi_time.t_pi;
  r.f_comp_star = report.amplitude.f_comp_star;
  r.delta_phi_star = report.phase.delta_phi_star;
  r.delta_ct_star = report.stark.delta_ct;
  r.residual = report.phase.rms;
  r.residual_floor = report.amplitude.residual_floor;
  r.timestamp = std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
  return report;
}

std::string format_iso8601(double unix_seconds) {
  const auto secs = static_cast<std::time_t>(std::floor(unix_seconds));
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

nlohmann::json diagnostics_json(const FitDiagnostics& d) {
  return {{"iterations", d.iterations},
          {"residual_rms", d.residual_rms},
          {"sse_trace", d.sse_trace},
          {"parameters", d.parameters}};
}

}  // namespace

std::string calibration_to_json(const CalibrationResult& r) {
  nlohmann::json j = {{"t_pi_ct_s", r.t_pi_ct},
                      {"f_comp_star", r.f_comp_star},
                      {"delta_phi_star_rad", r.delta_phi_star},
                      {"delta_ct_star_rad_per_s", r.delta_ct_star},
                      {"residual", r.residual},
                      {"residual_floor", r.residual_floor},
                      {"timestamp", format_iso8601(r.timestamp)},
                      {"timestamp_unix_s", r.timestamp}};
  return j.dump(2);
}

CalibrationResult calibration_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    CalibrationResult r;
    r.t_pi_ct = j.at("t_pi_ct_s").get<double>();
    r.f_comp_star = j.at("f_comp_star").get<double>();
    r.delta_phi_star = j.at("delta_phi_star_rad").get<double>();
    r.delta_ct_star = j.at("delta_ct_star_rad_per_s").get<double>();
    r.residual = j.at("residual").get<double>();
    r.residual_floor = j.value("residual_floor", 0.0);
    r.timestamp = j.at("timestamp_unix_s").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Configuration, std::string("calibration result: ") + e.what());
  }
}

std::string diagnostics_to_json(const CalibrationReport& report) {
  nlohmann::json j;
  j["pi_time"] = diagnostics_json(report.pi_time.fit);
  j["pi_time"]["contrast"] = report.pi_time.contrast;
  j["amplitude"] = {{"evaluations", report.amplitude.evaluations}};
  j["phase"] = diagnostics_json(report.phase.fit);
  j["phase"]["scan_phase_rad"] = report.phase.scan_phase;
  j["phase"]["scan_population"] = report.phase.scan_population;
  j["stark"] = diagnostics_json(report.stark.fit);
  return j.dump(2);
}

std::string write_calibration(const CalibrationReport& report, const std::string& path) {
  std::string sidecar = path;
  const std::string ext = ".json";
  if (sidecar.size() > ext.size() && sidecar.compare(sidecar.size() - ext.size(), ext.size(), ext) == 0)
    sidecar.resize(sidecar.size() - ext.size());
  sidecar += ".diagnostics.json";
  std::ofstream out(path);
  std::ofstream side(sidecar);
  if (!out || !side) fail(ErrorKind::Configuration, "cannot write calibration output: " + path);
  out << calibration_to_json(report.result) << '\n';
  side << diagnostics_to_json(report) << '\n';
  return sidecar;
}

}  // namespace xtalk
