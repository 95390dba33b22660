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
#include <complex>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "xtalk/error.hpp"
#include "xtalk/scenarios.hpp"

using namespace xtalk;
using std::numbers::pi;

namespace {

ScenarioConfig config(const std::string& json, Scenario s) { return parse_config(json, s); }

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("config parsing rejects bad input") {
  auto bad = [](const std::string& json, Scenario s = Scenario::XError) {
    return kind_of([&] { parse_config(json, s); });
  };
  CHECK(bad(R"({"shots": 10, "colour": 3})") == ErrorKind::Configuration);
  CHECK(bad(R"({"context": {"fct": 0.1}})") == ErrorKind::Configuration);
  CHECK(bad(R"({"scenario": "z-error"})") == ErrorKind::Configuration);
  CHECK(bad(R"({"method": "magic"})") == ErrorKind::Configuration);
  CHECK(bad(R"({"shots": 0})") == ErrorKind::Configuration);
  CHECK(bad(R"({"shots": "many"})") == ErrorKind::Configuration);
  CHECK(bad(R"({"compensation": {"f_eff": 0.004, "f_comp": 1.0}})") == ErrorKind::Configuration);
  CHECK(bad(R"({"scan": {"channel": "both"}})", Scenario::RabiScan) == ErrorKind::Configuration);
  CHECK(bad(R"({"noise": {"aom": {"tau_s": 1, "bogus": 2}}})") == ErrorKind::Configuration);
  CHECK(bad("{not json") == ErrorKind::Configuration);
  CHECK(kind_of([] { parse_scenario("x-errors"); }) == ErrorKind::Configuration);
  CHECK(kind_of([] { load_config("/nonexistent/cfg.json", Scenario::XError); }) == ErrorKind::Configuration);
}

TEST_CASE("every shipped config parses") {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(XTALK_CONFIG_DIR)) {
    const auto name = entry.path().stem().string();
    const auto scenario_tag = name.substr(0, name.find("-pcc")).substr(0, name.find("-sk1"));
    const auto cfg = load_config(entry.path().string(), parse_scenario(scenario_tag));
    CHECK(cfg.config_hash != 0);
    ++seen;
  }
  CHECK(seen >= 8);
}

TEST_CASE("residual ratio maps onto an anti-phased tone") {
  const auto cfg = config(R"({"method": "pcc", "context": {"f_ct": 0.096}, "compensation": {"f_eff": 0.004}})",
                          Scenario::XError);
  CHECK(cfg.compensation.f_comp() == doctest::Approx(1.0 - 0.004 / 0.096));
  CHECK(cfg.compensation.delta_phi() == doctest::Approx(pi));
  const auto r = run_x_error(cfg);
  CHECK(r.value_mean[0] == doctest::Approx(std::pow(std::sin(pi * 0.004 / 2), 2)).epsilon(1e-6));
  CHECK(r.value_mean[0] == doctest::Approx(3.95e-5).epsilon(0.01));
}

TEST_CASE("x error values") {
  const auto none = run_x_error(config(R"({"context": {"f_ct": 0.096}, "scan": {"pulses": [1, 2, 3]}})", Scenario::XError));
  REQUIRE(none.x.size() == 3);
  CHECK(none.value_mean[0] == doctest::Approx(2.26e-2).epsilon(0.01));
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(none.value_mean[i] == doctest::Approx(std::pow(std::sin(pi * (i + 1) * 0.096 / 2), 2)).epsilon(1e-10));
  const auto exact = run_x_error(config(R"({"method": "pcc", "context": {"f_ct": 0.096}})", Scenario::XError));
  for (double v : exact.value_mean) CHECK(v <= 1e-20);
  for (double v : exact.value_sampled) CHECK(v == 0.0);
}

TEST_CASE("z error values") {
  const auto pcc = run_z_error(config(R"({"method": "pcc", "context": {"f_ct": 0.096}, "compensation": {"f_eff": 0.0045}})",
                                      Scenario::ZError));
  CHECK(pcc.value_mean[0] == doctest::Approx(5.0e-5).epsilon(0.02));
  const auto sk = run_z_error(config(R"({"method": "sk1", "context": {"f_ct": 0.096, "delta_ct_rad_per_s": 51522.1}})",
                                     Scenario::ZError));
  CHECK(sk.value_mean[0] == doctest::Approx(2.6e-2).epsilon(0.1));
  CHECK(sk.value_mean[0] > 100 * pcc.value_mean[0]);
  // Twenty pulses at f_ct = 0.1 rotate the spectator by a full turn.
  const auto back = run_z_error(config(R"({"context": {"f_ct": 0.1}, "scan": {"pulses": [10, 20, 40]}})", Scenario::ZError));
  CHECK(back.value_mean[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(back.value_mean[1] <= 1e-20);
  CHECK(back.value_mean[2] <= 1e-20);
}

TEST_CASE("phase scan follows the closed form") {
  for (int n : {1, 2}) {
    std::ostringstream js;
    js << R"({"context": {"f_ct": 0.096}, "compensation": {"f_comp": 0.9, "delta_phi_rad": 0}, "scan": {"periods": )"
       << n << "}}";
    const auto r = run_phase_scan(config(js.str(), Scenario::PhaseScan));
    REQUIRE(r.x.size() == 40);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      const double mag = std::abs(1.0 + std::polar(0.9, r.x[i]));
      CHECK(std::abs(r.value_mean[i] - std::pow(std::sin(n * pi * mag), 2)) <= 1e-9);
    }
  }
  const auto unit = run_phase_scan(config(R"({"context": {"f_ct": 0.096}})", Scenario::PhaseScan));
  CHECK(unit.value_mean[0] <= 1e-18);   // full 4 pi rotation at zero phase
  CHECK(unit.value_mean[20] <= 1e-18);  // cancellation at pi
}

TEST_CASE("rabi scan periods") {
  const auto s = run_rabi_scan(config(R"({"context": {"f_ct": 0.096}, "scan": {"points": 9}})", Scenario::RabiScan));
  REQUIRE(s.x.size() == 9);
  CHECK(s.value_mean[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.value_mean[4] <= 1e-20);
  const auto t = run_rabi_scan(config(R"({"scan": {"points": 9, "channel": "target"}})", Scenario::RabiScan));
  CHECK(t.value_mean[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kind_of([] { run_rabi_scan(config(R"({"method": "sk1"})", Scenario::RabiScan)); }) == ErrorKind::Configuration);
}

TEST_CASE("amplitude scan compares composite pulses") {
  auto run = [](const char* method) {
    return run_amplitude_scan(config(std::string(R"({"method": ")") + method + "\"}", Scenario::AmplitudeScan));
  };
  const auto sq = run("none"), sk = run("sk1"), quad = run("quad");
  REQUIRE(sq.x.size() == 121);
  CHECK(sq.x[100] == doctest::Approx(1.0));
  CHECK(sq.value_mean[100] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sk.value_mean[100] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(quad.value_mean[100] == doctest::Approx(1.0).epsilon(1e-12));
  // Flat top: a 10% amplitude error barely moves the composite pulse.
  CHECK(1.0 - sk.value_mean[110] < 0.1 * (1.0 - sq.value_mean[110]));
  CHECK(1.0 - sk.value_mean[90] < 0.1 * (1.0 - sq.value_mean[90]));
  const double slope = (sk.value_mean[101] - sk.value_mean[99]) / (sk.x[101] - sk.x[99]);
  CHECK(std::abs(slope) <= 1e-6);
  // Weak drive, as seen by a neighbouring ion.
  for (int i = 1; i <= 20; ++i) CHECK(quad.value_mean[i] < sq.value_mean[i]);
}

TEST_CASE("noise scenarios delegate to the hardware models") {
  const auto drift = run_drift_monitor(config(R"({"seed": 3, "shots": 1000})", Scenario::DriftMonitor));
  CHECK(drift.x.size() == 161);
  CHECK(drift.value_mean == sample_slow_drift(DriftProcess::enclosed(), 8.0, 0.05, 3));
  for (std::size_t i = 0; i < drift.x.size(); ++i) CHECK(std::abs(drift.value_sampled[i] - drift.value_mean[i]) < 0.3);

  const auto plain = run_duty_cycle_sweep(config("{}", Scenario::DutyCycleSweep));
  const auto mit = run_duty_cycle_sweep(config(R"({"scan": {"mitigation": true}})", Scenario::DutyCycleSweep));
  REQUIRE(plain.x.size() == 13);
  CHECK(plain.value_mean[0] == doctest::Approx(0.35).epsilon(1e-6));
  CHECK(mit.value_mean[0] == doctest::Approx(0.035).epsilon(0.2));
  for (std::size_t i = 1; i < plain.x.size(); ++i) CHECK(plain.value_mean[i] < plain.value_mean[i - 1]);
  for (std::size_t i = 0; i + 1 < plain.x.size(); ++i) {
    CHECK(std::abs(plain.value_sampled[i] - plain.value_mean[i]) <= 5 * plain.stderr_[i] + 1e-9);
    CHECK(mit.value_mean[i] <= (0.1 + 1e-9) * plain.value_mean[i]);
  }

  const auto total = run_beam_profile(config("{}", Scenario::BeamProfile));
  CHECK(total.x.size() == 10);
  for (std::size_t i = 0; i < total.x.size(); ++i) CHECK(total.x[i] != 0.0);
  const auto gauss = run_beam_profile(config(R"({"scan": {"component": "gaussian"}})", Scenario::BeamProfile));
  CHECK(gauss.x.size() == 301);
  CHECK(gauss.value_mean[150] == doctest::Approx(1.0));
}

TEST_CASE("output is identical across worker counts") {
  const char* docs[][2] = {
      {"x-error", R"({"method": "pcc", "seed": 4, "compensation": {"f_eff": 0.004}, "scan": {"pulses": [1, 2, 3, 5, 8, 13]}})"},
      {"z-error", R"({"method": "sk1", "seed": 5})"},
      {"phase-scan", R"({"seed": 6, "compensation": {"f_comp": 0.95, "delta_phi_rad": 3}})"},
      {"amplitude-scan", R"({"method": "quad", "seed": 7})"},
      {"duty-cycle-sweep", R"({"seed": 8, "scan": {"measure_s": 3}})"},
  };
  for (const auto& [tag, body] : docs) {
    auto cfg = config(body, parse_scenario(tag));
    cfg.workers = 1;
    const auto one = to_csv(run_scenario(cfg));
    cfg.workers = 4;
    CHECK(to_csv(run_scenario(cfg)) == one);
  }
}

TEST_CASE("csv layout") {
  const auto cfg = config(R"({"seed": 9, "shots": 50, "scan": {"pulses": [1, 2]}})", Scenario::XError);
  const auto csv = to_csv(run_x_error(cfg));
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 10);
  CHECK(lines[0] == "# scenario: x-error");
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.config_hash));
  CHECK(lines[1] == std::string("# config_hash: ") + hash);
  CHECK(lines[2] == "# seed: 9");
  CHECK(lines[3] == "# shots: 50");
  CHECK(lines[4].rfind("# build: ", 0) == 0);
  CHECK(lines[7] == "x,value_mean,value_sampled,stderr");
  CHECK(lines[8].rfind("1,", 0) == 0);
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("sampled values converge within five standard errors") {
  const char* docs[][2] = {
      {"x-error", R"({"shots": 10000, "seed": 10, "context": {"f_ct": 0.2}, "scan": {"pulses": [1, 2, 3, 4, 5, 6, 7, 8]}})"},
      {"rabi-scan", R"({"shots": 10000, "seed": 11})"},
      {"phase-scan", R"({"shots": 10000, "seed": 12, "compensation": {"f_comp": 0.7, "delta_phi_rad": 0}})"},
      {"amplitude-scan", R"({"shots": 10000, "seed": 13, "method": "sk1"})"},
  };
  for (const auto& [tag, body] : docs) {
    const auto r = run_scenario(config(body, parse_scenario(tag)));
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      CHECK(r.value_mean[i] >= 0.0);
      CHECK(r.value_mean[i] <= 1.0);
      CHECK(std::abs(r.value_sampled[i] - r.value_mean[i]) <= 5 * r.stderr_[i] + 1e-12);
    }
  }
}
