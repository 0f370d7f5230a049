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

#include <numbers>

#include "support.hpp"
#include "tprocess/objectives.hpp"

using namespace tprocess;

TEST_CASE("sinusoidal objective") {
  CHECK(objective_sinusoidal(5.0) == doctest::Approx(-16.0 * std::sin(17.0)).epsilon(1e-15));
  CHECK(objective_sinusoidal(5.0) == doctest::Approx(15.382359870072909).epsilon(1e-14));
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 1000000; ++i) best = std::min(best, objective_sinusoidal(5.0 + 5.0 * i / 1e6));
  CHECK(best >= kSinusoidalMinimum - 1e-9);
  CHECK(best == doctest::Approx(kSinusoidalMinimum).epsilon(1e-9));
  CHECK(objective_sinusoidal(8.400104850139247) == doctest::Approx(kSinusoidalMinimum).epsilon(1e-14));
  CHECK_THROWS_AS(objective_sinusoidal(4.99), OutOfDomain);
  CHECK_THROWS_AS(objective_sinusoidal(std::numeric_limits<double>::quiet_NaN()), OutOfDomain);
}

TEST_CASE("Branin minima") {
  const double pi = std::numbers::pi;
  for (auto [a, b] : {std::pair{-pi, 12.275}, std::pair{pi, 2.275}, std::pair{9.42478, 2.475}}) {
    CHECK(objective_branin((VectorXd(2) << a, b).finished()) == doctest::Approx(kBraninMinimum).epsilon(1e-6));
  }
  CHECK(objective_branin((VectorXd(2) << 0.0, 0.0).finished()) ==
        doctest::Approx(std::pow(-5.1 / (4 * pi * pi) * 0 + 0 - 6, 2) + 10 * (1 - 1 / (8 * pi)) + 10));
  CHECK_THROWS_AS(objective_branin((VectorXd(2) << 10.5, 3.0).finished()), OutOfDomain);
  CHECK_THROWS_AS(objective_branin(VectorXd::Zero(3)), DimensionMismatch);
}

TEST_CASE("Hartmann 6-D minimum") {
  const VectorXd argmin = (VectorXd(6) << 0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573).finished();
  CHECK(objective_hartmann6(argmin) == doctest::Approx(kHartmann6Minimum).epsilon(1e-5));
  RngHandle rng(61);
  double best = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    VectorXd x(6);
    for (int d = 0; d < 6; ++d) x(d) = rng.uniform();
    best = std::min(best, objective_hartmann6(x));
  }
  CHECK(best > kHartmann6Minimum);
  CHECK_THROWS_AS(objective_hartmann6(VectorXd::Constant(6, 1.1)), OutOfDomain);
}

TEST_CASE("benchmark registry") {
  for (const char* name : {"sinusoidal", "branin", "hartmann6"}) {
    const Benchmark b = make_benchmark(name);
    CHECK(b.name == name);
    CHECK(b.initial_design.cols() == b.lower.size());
    for (Eigen::Index i = 0; i < b.initial_design.rows(); ++i) {
      const VectorXd x = b.initial_design.row(i).transpose();
      CHECK((x.array() >= b.lower.array()).all());
      CHECK((x.array() <= b.upper.array()).all());
      CHECK(b.objective(x) >= b.minimum);
    }
  }
  CHECK(make_benchmark("sinusoidal").initial_design.rows() == 2);
  CHECK(make_benchmark("branin").initial_design.rows() == 4);
  CHECK_THROWS_AS(make_benchmark("rastrigin"), DomainError);
}
