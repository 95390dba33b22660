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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "xtalk/calibration.hpp"
#include "xtalk/scenarios.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int exit_code(xtalk::ErrorKind kind) {
  switch (kind) {
    case xtalk::ErrorKind::NumericalFailure:
    case xtalk::ErrorKind::FitFailure:
    case xtalk::ErrorKind::DegenerateFit:
    case xtalk::ErrorKind::LowSignal:
      return kExitNumerical;
    default:
      return kExitConfig;
  }
}

void emit(const std::string& body, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) xtalk::fail(xtalk::ErrorKind::Configuration, "cannot write output file: " + path);
  out << body;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crosstalk cancellation simulator and calibration runner"};
  std::string scenario_arg;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  std::optional<int> workers;
  std::string out_path;
  app.add_option("scenario", scenario_arg,
                 "x-error | z-error | phase-scan | rabi-scan | amplitude-scan | drift-monitor | "
                 "duty-cycle-sweep | beam-profile | calibrate")
      ->required();
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--seed", seed, "RNG seed (overrides XTALK_SEED and the config)");
  app.add_option("--out", out_path, "output path, '-' for stdout");
  app.add_option("--shots", shots, "shots per point");
  app.add_option("--workers", workers, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    const auto scenario = xtalk::parse_scenario(scenario_arg);
    auto cfg = xtalk::load_config(config_path, scenario);
    if (seed) {
      cfg.seed = *seed;
    } else if (const char* env = std::getenv("XTALK_SEED"); env && *env) {
      try {
        std::size_t used = 0;
        cfg.seed = std::stoull(env, &used);
        if (env[used] != '\0') throw std::invalid_argument(env);
      } catch (const std::exception&) {
        xtalk::fail(xtalk::ErrorKind::Configuration, std::string("XTALK_SEED is not an unsigned integer: ") + env);
      }
    }
    if (shots) {
      if (*shots < 1) xtalk::fail(xtalk::ErrorKind::Configuration, "--shots must be >= 1");
      cfg.shots = *shots;
      cfg.chain.shots = *shots;
    }
    if (workers) {
      if (*workers < 1) xtalk::fail(xtalk::ErrorKind::Configuration, "--workers must be >= 1");
      cfg.workers = *workers;
    }
    const std::string path = out_path.empty() ? cfg.output : out_path;

    if (scenario == xtalk::Scenario::Calibrate) {
      cfg.chain.seed = cfg.seed;
      const auto report = xtalk::run_calibration_chain(cfg.ctx, cfg.chain);
      if (path.empty() || path == "-") {
        std::cout << xtalk::calibration_to_json(report.result) << '\n';
      } else {
        const auto sidecar = xtalk::write_calibration(report, path);
        std::cerr << "wrote " << path << " and " << sidecar << '\n';
      }
      return 0;
    }
    emit(xtalk::to_csv(xtalk::run_scenario(cfg)), path);
    return 0;
  } catch (const xtalk::Error& e) {
    std::cerr << "xtalk: " << xtalk::to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "xtalk: " << e.what() << '\n';
    return kExitNumerical;
  }
}
