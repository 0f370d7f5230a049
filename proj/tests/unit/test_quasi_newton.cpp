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

#include <doctest.h>

#include "tprocess/quasi_newton.hpp"

using namespace tprocess;

TEST_CASE("concave quadratic") {
  MatrixXd a(3, 3);
  a << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
  const VectorXd c = (VectorXd(3) << 1.0, -2.0, 0.5).finished();
  const ObjectiveWithGradient f = [&](const VectorXd& x, VectorXd& g) {
    const VectorXd r = x - c;
    g = -a * r;
    return -0.5 * r.dot(a * r);
  };
  QuasiNewtonOptions opt;
  opt.lower = VectorXd::Constant(3, -10.0);
  opt.upper = VectorXd::Constant(3, 10.0);
  const QuasiNewtonResult r = maximize_bfgs(f, VectorXd::Zero(3), opt);
  CHECK(r.converged);
  CHECK((r.x - c).norm() < 1e-6);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1] - 1e-12);
}

TEST_CASE("Rosenbrock") {
  const ObjectiveWithGradient f = [](const VectorXd& x, VectorXd& g) {
    const double a = 1.0 - x(0);
    const double b = x(1) - x(0) * x(0);
    g.resize(2);
    g(0) = -(-2.0 * a - 400.0 * x(0) * b);
    g(1) = -(200.0 * b);
    return -(a * a + 100.0 * b * b);
  };
  QuasiNewtonOptions opt;
  opt.max_iterations = 2000;
  opt.lower = VectorXd::Constant(2, -5.0);
  opt.upper = VectorXd::Constant(2, 5.0);
  const QuasiNewtonResult r = maximize_bfgs(f, (VectorXd(2) << -1.2, 1.0).finished(), opt);
  CHECK((r.x - VectorXd::Ones(2)).norm() < 1e-4);
}

TEST_CASE("active box constraint") {
  const ObjectiveWithGradient f = [](const VectorXd& x, VectorXd& g) {
    g = -2.0 * (x - VectorXd::Constant(2, 3.0));
    return -(x - VectorXd::Constant(2, 3.0)).squaredNorm();
  };
  QuasiNewtonOptions opt;
  opt.lower = VectorXd::Constant(2, -1.0);
  opt.upper = (VectorXd(2) << 1.0, 5.0).finished();
  const QuasiNewtonResult r = maximize_bfgs(f, VectorXd::Zero(2), opt);
  CHECK(r.x(0) == doctest::Approx(1.0));
  CHECK(r.x(1) == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(r.projected_gradient_norm < 1e-6);
}
