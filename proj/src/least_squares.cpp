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

#include "xtalk/least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace xtalk {

FitDiagnostics LeastSquaresResult::diagnostics() const {
  FitDiagnostics d;
  d.iterations = iterations;
  d.residual_rms = rms;
  d.sse_trace = sse_trace;
  d.parameters.assign(parameters.data(), parameters.data() + parameters.size());
  return d;
}

Eigen::MatrixXd numerical_jacobian(const ResidualFn& residuals, const Eigen::VectorXd& x, double relative_step) {
  const Eigen::VectorXd r0 = residuals(x);
  Eigen::MatrixXd jac(r0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    // Floored so a parameter sitting near zero still moves the residuals.
    const double h = relative_step * std::max(std::abs(x[j]), 1.0);
    Eigen::VectorXd up = x, down = x;
    up[j] += h;
    down[j] -= h;
    jac.col(j) = (residuals(up) - residuals(down)) / (2.0 * h);
  }
  return jac;
}

LeastSquaresResult gauss_newton(const ResidualFn& residuals, const Eigen::VectorXd& x0,
                                const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                const LeastSquaresOptions& options) {
  const Eigen::Index n = x0.size();
  if (lower.size() != n || upper.size() != n) fail(ErrorKind::InvalidArgument, "bounds size mismatch");
  if (!((upper - lower).array() >= 0.0).all()) fail(ErrorKind::InvalidArgument, "lower bound exceeds upper bound");
  auto clamp = [&](Eigen::VectorXd x) { return x.cwiseMax(lower).cwiseMin(upper).eval(); };

  LeastSquaresResult out;
  out.parameters = clamp(x0);
  Eigen::VectorXd r = residuals(out.parameters);
  if (r.size() < n) fail(ErrorKind::InvalidArgument, "fewer residuals than parameters");
  if (!r.allFinite()) fail(ErrorKind::NumericalFailure, "non-finite residual at start point");
  out.sse = r.squaredNorm();
  out.sse_trace.push_back(out.sse);

  Eigen::MatrixXd jac;
  Eigen::VectorXd scale;
  auto equilibrated = [&]() {
    jac = numerical_jacobian(residuals, out.parameters, options.relative_step);
    scale = jac.colwise().norm().transpose();
    if ((scale.array() == 0.0).any() || !jac.allFinite())
      fail(ErrorKind::DegenerateFit, "singular Jacobian: a parameter has no influence on the residuals");
    return (jac * scale.cwiseInverse().asDiagonal()).eval();
  };

  while (out.iterations < options.max_iterations && out.sse > 0.0) {
    const Eigen::MatrixXd js = equilibrated();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(js);
    qr.setThreshold(options.rank_tolerance);
    if (qr.rank() < n) fail(ErrorKind::DegenerateFit, "singular Jacobian: parameters are not identifiable");
    const Eigen::VectorXd step = -(qr.solve(r).array() / scale.array()).matrix();
    ++out.iterations;

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, lambda *= 0.5) {
      const Eigen::VectorXd trial = clamp(out.parameters + lambda * step);
      const Eigen::VectorXd rt = residuals(trial);
      const double sse = rt.allFinite() ? rt.squaredNorm() : std::numeric_limits<double>::infinity();
      if (sse < out.sse) {
        const double gain = out.sse - sse;
        out.parameters = trial;
        r = rt;
        out.sse = sse;
        out.sse_trace.push_back(sse);
        accepted = true;
        if (gain <= options.tolerance * out.sse_trace[out.sse_trace.size() - 2]) lambda = -1.0;
        break;
      }
    }
    out.rms = std::sqrt(out.sse / static_cast<double>(r.size()));
    if (!accepted) {
      if (out.rms > options.failure_rms)
        throw FitFailure("fit diverged: step halving exhausted with rms " + std::to_string(out.rms),
                         out.diagnostics());
      break;
    }
    if (lambda < 0.0) break;
  }
  out.rms = std::sqrt(out.sse / static_cast<double>(r.size()));

  const Eigen::MatrixXd js = equilibrated();
  const Eigen::Index dof = r.size() > n ? r.size() - n : 1;
  const Eigen::MatrixXd inv = (js.transpose() * js).ldlt().solve(Eigen::MatrixXd::Identity(n, n));
  out.covariance = (out.sse / static_cast<double>(dof)) * scale.cwiseInverse().asDiagonal() * inv *
                   scale.cwiseInverse().asDiagonal();
  return out;
}

}  // namespace xtalk
