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
#include <string>

#include "tprocess/numerics.hpp"

namespace tprocess {

/// A box-constrained benchmark with a known global minimum.
struct Benchmark {
  std::string name;
  std::function<double(const VectorXd&)> objective;
  VectorXd lower;
  VectorXd upper;
  MatrixXd initial_design;
  double minimum = 0.0;
};

/// -(x - 1)^2 sin(3x + 5/x + 1) on [5, 10].
double objective_sinusoidal(double x);
/// Branin-Hoo on [-5, 10] x [0, 15].
double objective_branin(const VectorXd& x);
/// Hartmann 6-D on the unit cube.
double objective_hartmann6(const VectorXd& x);

inline constexpr double kSinusoidalMinimum = -54.52992578073266;
inline constexpr double kBraninMinimum = 0.39788735772973816;
inline constexpr double kHartmann6Minimum = -3.322368011391339;

/// Throws DomainError for an unknown name.
Benchmark make_benchmark(const std::string& name);

}  // namespace tprocess
