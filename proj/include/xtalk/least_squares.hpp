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

// Damped Gauss-Newton for small bounded nonlinear least-squares problems.

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "xtalk/error.hpp"

namespace xtalk {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LeastSquaresOptions {
  int max_iterations = 100;
  int max_halvings = 30;
  double relative_step = 1e-6;      // central-difference Jacobian
  double tolerance = 1e-14;         // relative SSE decrease that ends the run
  double rank_tolerance = 1e-10;    // on the equilibrated Jacobian
  // If halving is exhausted while the rms residual exceeds this, the fit
  // is reported as diverged.
  double failure_rms = std::numeric_limits<double>::infinity();
};

struct LeastSquaresResult {
  Eigen::VectorXd parameters;
  Eigen::MatrixXd covariance;
  double sse = 0.0;
  double rms = 0.0;
  int iterations = 0;
  // SSE at the start and after every accepted step; never increases.
  std::vector<double> sse_trace;

  FitDiagnostics diagnostics() const;
};

Eigen::MatrixXd numerical_jacobian(const ResidualFn& residuals, const Eigen::VectorXd& x, double relative_step);

/// Minimizes |r(x)|^2 with x clamped to [lower, upper]. Throws DegenerateFit
/// when the Jacobian loses rank and FitFailure on divergence.
LeastSquaresResult gauss_newton(const ResidualFn& residuals, const Eigen::VectorXd& x0,
                                const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                const LeastSquaresOptions& options = {});

}  // namespace xtalk
