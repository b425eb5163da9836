// Copyright 2026 The qfcsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Weighted nonlinear least squares (Levenberg–Marquardt) for the small
// models used by the scan analyses: a handful of parameters, a few hundred
// points, finite-difference Jacobians.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "qfc/error.hpp"
#include "qfc/text.hpp"

namespace qfc {

struct LmOptions {
  int max_iterations = 500;
  double relative_tolerance = 1e-14;
};

struct FitResult {
  Eigen::VectorXd params;
  /// Parameter covariance scaled by the reduced χ².
  Eigen::MatrixXd covariance;
  double chi2 = 0.0;
  std::size_t dof = 0;
  int iterations = 0;

  double sigma(Eigen::Index i) const { return std::sqrt(std::max(0.0, covariance(i, i))); }
};

/// Minimizes Σ ((y_i − model(x_i, p)) / σ_i)² starting from `start`.
/// `model` is callable as double(double x, const Eigen::VectorXd& p).
template <class Model>
FitResult levenberg_marquardt(Model&& model, std::span<const double> x, std::span<const double> y,
                              std::span<const double> sigma, Eigen::VectorXd start,
                              const LmOptions& opts = {}) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Index np = start.size();
  if (y.size() != x.size() || sigma.size() != x.size()) throw DomainError("fit arrays differ in length");
  if (n <= np) throw DomainError("fit needs more points than parameters");

  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r(i) = (y[i] - model(x[i], p)) / sigma[i];
    return r;
  };
  auto jacobian = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd j(n, np);
    for (Eigen::Index k = 0; k < np; ++k) {
      const double h = 1e-7 * std::max(std::abs(p(k)), 1e-3);
      Eigen::VectorXd up = p, dn = p;
      up(k) += h;
      dn(k) -= h;
      for (Eigen::Index i = 0; i < n; ++i) {
        // Jacobian of the model (not the residual), weighted.
        j(i, k) = (model(x[i], up) - model(x[i], dn)) / (2.0 * h) / sigma[i];
      }
    }
    return j;
  };

  Eigen::VectorXd p = std::move(start);
  Eigen::VectorXd r = residuals(p);
  double chi2 = r.squaredNorm();
  double lambda = 1e-3;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const Eigen::MatrixXd j = jacobian(p);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd jtr = j.transpose() * r;
    bool improved = false;
    double new_chi2 = chi2;
    Eigen::VectorXd candidate;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      candidate = p + a.ldlt().solve(jtr);
      if (!candidate.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd rc = residuals(candidate);
      new_chi2 = rc.squaredNorm();
      if (new_chi2 <= chi2) {
        improved = true;
        r = rc;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
    const double drop = chi2 - new_chi2;
    const double step = (candidate - p).norm();
    p = candidate;
    chi2 = new_chi2;
    lambda = std::max(lambda / 10.0, 1e-12);
    if (drop <= opts.relative_tolerance * std::max(chi2, 1e-300) ||
        step <= 1e-15 * (p.norm() + 1e-15)) {
      ++it;
      break;
    }
  }
  if (it >= opts.max_iterations) {
    throw ConvergenceError("least-squares fit did not converge in " +
                           std::to_string(opts.max_iterations) + " iterations (chi2 = " +
                           format_double(chi2) + ")");
  }
  if (!p.allFinite()) throw ConvergenceError("least-squares fit diverged");

  FitResult out;
  out.params = p;
  out.chi2 = chi2;
  out.dof = static_cast<std::size_t>(n - np);
  out.iterations = it;
  const Eigen::MatrixXd j = jacobian(p);
  const Eigen::MatrixXd jtj = j.transpose() * j;
  // Pseudo-inverse: a parameter the data cannot constrain (e.g. a flat
  // Jacobian column) gets zero variance instead of failing the fit.
  out.covariance = jtj.completeOrthogonalDecomposition().pseudoInverse() *
                   (chi2 / static_cast<double>(out.dof));
  return out;
}

}  // namespace qfc
