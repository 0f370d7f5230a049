/*
 * Copyright 2026 The tprocess Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tprocess/quasi_newton.hpp"

#include <cmath>
#include <limits>

namespace tprocess {

namespace {

VectorXd clamp(const VectorXd& x, const VectorXd& lo, const VectorXd& hi) { return x.cwiseMax(lo).cwiseMin(hi); }

// Gradient with components that point out of the box at an active bound removed.
VectorXd projected(const VectorXd& x, const VectorXd& g, const VectorXd& lo, const VectorXd& hi) {
  VectorXd p = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if ((x(i) <= lo(i) && g(i) < 0.0) || (x(i) >= hi(i) && g(i) > 0.0)) p(i) = 0.0;
  }
  return p;
}

bool evaluate(const ObjectiveWithGradient& f, const VectorXd& x, double& value, VectorXd& grad) {
  try {
    value = f(x, grad);
  } catch (const NumericError&) {
    return false;
  }
  return std::isfinite(value) && grad.allFinite();
}

}  // namespace

QuasiNewtonResult maximize_bfgs(const ObjectiveWithGradient& f, VectorXd x0, const QuasiNewtonOptions& options) {
  const Eigen::Index n = x0.size();
  const VectorXd lo = options.lower.size() == n ? options.lower
                                                : VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  const VectorXd hi = options.upper.size() == n ? options.upper
                                                : VectorXd::Constant(n, std::numeric_limits<double>::infinity());

  QuasiNewtonResult out;
  out.x = clamp(x0, lo, hi);
  out.gradient.resize(n);
  // The starting point must be feasible; errors there propagate to the caller.
  out.value = f(out.x, out.gradient);
  if (!std::isfinite(out.value)) throw NonFiniteDensity("maximize_bfgs: objective not finite at start");
  out.trace.push_back(out.value);

  MatrixXd h = MatrixXd::Identity(n, n);  // inverse Hessian of -f
  bool fresh = true;
  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    VectorXd pg = projected(out.x, out.gradient, lo, hi);
    out.projected_gradient_norm = pg.lpNorm<Eigen::Infinity>();
    if (out.projected_gradient_norm < options.gradient_tolerance) {
      out.converged = true;
      break;
    }

    VectorXd dir = h * out.gradient;
    dir = projected(out.x, dir, lo, hi);
    if (dir.dot(out.gradient) <= 0.0) {
      h.setIdentity();
      fresh = true;
      dir = pg;
    }

    double step = fresh ? std::min(1.0, 1.0 / dir.lpNorm<Eigen::Infinity>()) : 1.0;
    VectorXd x_new(n);
    VectorXd g_new(n);
    double v_new = 0.0;
    bool accepted = false;
    for (int k = 0; k < 50; ++k) {
      x_new = clamp(out.x + step * dir, lo, hi);
      if (evaluate(f, x_new, v_new, g_new) && v_new >= out.value + 1e-4 * out.gradient.dot(x_new - out.x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (fresh) break;
      h.setIdentity();
      fresh = true;
      continue;
    }

    const VectorXd s = x_new - out.x;
    const VectorXd y = out.gradient - g_new;  // gradient change of -f
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh) h *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const MatrixXd eye = MatrixXd::Identity(n, n);
      h = (eye - rho * s * y.transpose()) * h * (eye - rho * y * s.transpose()) + rho * s * s.transpose();
      fresh = false;
    }
    const bool stalled = std::abs(v_new - out.value) <= 1e-15 * (1.0 + std::abs(out.value)) &&
                         s.lpNorm<Eigen::Infinity>() <= 1e-14;
    out.x = x_new;
    out.value = v_new;
    out.gradient = g_new;
    out.trace.push_back(out.value);
    if (stalled) break;
  }
  out.projected_gradient_norm = projected(out.x, out.gradient, lo, hi).lpNorm<Eigen::Infinity>();
  if (out.projected_gradient_norm < options.gradient_tolerance) out.converged = true;
  return out;
}

}  // namespace tprocess
