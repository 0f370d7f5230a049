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

#include "tprocess/objectives.hpp"

#include <cmath>
#include <numbers>

#include "tprocess/error.hpp"

namespace tprocess {

namespace {

void check_box(const VectorXd& x, const VectorXd& lo, const VectorXd& hi, const char* name) {
  if (x.size() != lo.size()) throw DimensionMismatch(std::string(name) + ": wrong input dimension");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x(i) >= lo(i) && x(i) <= hi(i))) throw OutOfDomain(std::string(name) + ": input outside the domain");
  }
}

}  // namespace

double objective_sinusoidal(double x) {
  if (!(x >= 5.0 && x <= 10.0)) throw OutOfDomain("sinusoidal: input outside [5, 10]");
  return -(x - 1.0) * (x - 1.0) * std::sin(3.0 * x + 5.0 / x + 1.0);
}

double objective_branin(const VectorXd& x) {
  check_box(x, Eigen::Vector2d(-5.0, 0.0), Eigen::Vector2d(10.0, 15.0), "branin");
  constexpr double pi = std::numbers::pi;
  const double b = 5.1 / (4.0 * pi * pi);
  const double c = 5.0 / pi;
  const double t = 1.0 / (8.0 * pi);
  const double u = x(1) - b * x(0) * x(0) + c * x(0) - 6.0;
  return u * u + 10.0 * (1.0 - t) * std::cos(x(0)) + 10.0;
}

double objective_hartmann6(const VectorXd& x) {
  check_box(x, VectorXd::Zero(6), VectorXd::Ones(6), "hartmann6");
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static const double a[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                 {0.05, 10, 17, 0.1, 8, 14},
                                 {3, 3.5, 1.7, 10, 17, 8},
                                 {17, 8, 0.05, 10, 0.1, 14}};
  static const double p[4][6] = {{1312, 1696, 5569, 124, 8283, 5886},
                                 {2329, 4135, 8307, 3736, 1004, 9991},
                                 {2348, 1451, 3522, 2883, 3047, 6650},
                                 {4047, 8828, 8732, 5743, 1091, 381}};
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double d = x(j) - 1e-4 * p[i][j];
      inner += a[i][j] * d * d;
    }
    s += alpha[i] * std::exp(-inner);
  }
  return -s;
}

Benchmark make_benchmark(const std::string& name) {
  Benchmark b;
  b.name = name;
  if (name == "sinusoidal") {
    b.objective = [](const VectorXd& x) {
      if (x.size() != 1) throw DimensionMismatch("sinusoidal: wrong input dimension");
      return objective_sinusoidal(x(0));
    };
    b.lower = VectorXd::Constant(1, 5.0);
    b.upper = VectorXd::Constant(1, 10.0);
    b.initial_design.resize(2, 1);
    b.initial_design << 5.0, 10.0;
    b.minimum = kSinusoidalMinimum;
  } else if (name == "branin") {
    b.objective = objective_branin;
    b.lower = Eigen::Vector2d(-5.0, 0.0);
    b.upper = Eigen::Vector2d(10.0, 15.0);
    b.initial_design.resize(4, 2);
    b.initial_design << -5.0, 0.0, 10.0, 0.0, -5.0, 15.0, 10.0, 15.0;
    b.minimum = kBraninMinimum;
  } else if (name == "hartmann6") {
    b.objective = objective_hartmann6;
    b.lower = VectorXd::Zero(6);
    b.upper = VectorXd::Ones(6);
    b.initial_design = MatrixXd::Zero(6, 6);
    for (int i = 1; i < 6; ++i) b.initial_design(i, i - 1) = 1.0;
    b.minimum = kHartmann6Minimum;
  } else {
    throw DomainError("unknown benchmark '" + name + "'");
  }
  return b;
}

}  // namespace tprocess
