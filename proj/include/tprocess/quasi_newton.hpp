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

#pragma once

#include <functional>
#include <vector>

#include "tprocess/numerics.hpp"

namespace tprocess {

/// Returns f(x) and writes the gradient. May throw NumericError, which the
/// line search treats as an infeasible trial point.
using ObjectiveWithGradient = std::function<double(const VectorXd&, VectorXd&)>;

struct QuasiNewtonOptions {
  int max_iterations = 200;
  /// Convergence on the infinity norm of the projected gradient.
  double gradient_tolerance = 1e-6;
  VectorXd lower;
  VectorXd upper;
};

struct QuasiNewtonResult {
  VectorXd x;
  double value = 0.0;
  VectorXd gradient;
  double projected_gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

/// Box-projected BFGS ascent with backtracking (Armijo) line search.
QuasiNewtonResult maximize_bfgs(const ObjectiveWithGradient& f, VectorXd x0, const QuasiNewtonOptions& options);

}  // namespace tprocess
