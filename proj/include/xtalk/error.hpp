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

#include <stdexcept>
#include <string>
#include <vector>

namespace xtalk {

enum class ErrorKind {
  InvalidArgument,
  OutOfRange,
  NumericalFailure,
  Conflict,
  LowSignal,
  Configuration,
  FitFailure,
  DegenerateFit,
  Range,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Diagnostics carried by a failed least-squares fit.
struct FitDiagnostics {
  int iterations = 0;
  double residual_rms = 0.0;
  std::vector<double> sse_trace;
  std::vector<double> parameters;
};

class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, FitDiagnostics diagnostics)
      : Error(ErrorKind::FitFailure, what), diagnostics_(std::move(diagnostics)) {}

  const FitDiagnostics& diagnostics() const noexcept { return diagnostics_; }

 private:
  FitDiagnostics diagnostics_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace xtalk
