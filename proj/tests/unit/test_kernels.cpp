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

#include "support.hpp"
#include "tprocess/kernels.hpp"

using namespace tprocess;

namespace {

double se_direct(double amp, const VectorXd& ls, const VectorXd& a, const VectorXd& b) {
  return amp * std::exp(-0.5 * ((a - b).array() / ls.array()).square().sum());
}

double m52_direct(double amp, const VectorXd& ls, const VectorXd& a, const VectorXd& b) {
  const double r = std::sqrt(5.0 * ((a - b).array() / ls.array()).square().sum());
  return amp * (1.0 + r) * std::exp(-r);
}

KernelSpec spec_of(KernelFamily f, Eigen::Index d, bool noise) { return KernelSpec{f, d, noise}; }

}  // namespace

TEST_CASE("kernel values against direct formulas") {
  RngHandle rng(21);
  VectorXd ls(3);
  ls << 0.5, 1.3, 2.0;
  const KernelParams p = KernelParams::from_values(1.7, ls, 0.2);
  for (int t = 0; t < 20; ++t) {
    const VectorXd a = rng.normal_vector(3);
    const VectorXd b = rng.normal_vector(3);
    CHECK(kernel_eval(spec_of(KernelFamily::squared_exponential_ard, 3, false), p, a, b, false) ==
          doctest::Approx(se_direct(1.7, ls, a, b)).epsilon(1e-13));
    CHECK(kernel_eval(spec_of(KernelFamily::matern52_ard, 3, false), p, a, b, false) ==
          doctest::Approx(m52_direct(1.7, ls, a, b)).epsilon(1e-13));
  }
  const VectorXd a = rng.normal_vector(3);
  CHECK(kernel_eval(spec_of(KernelFamily::matern52_ard, 3, true), p, a, a, true) == doctest::Approx(1.9));
  CHECK(kernel_eval(spec_of(KernelFamily::matern52_ard, 3, true), p, a, a, false) == doctest::Approx(1.7));
}

TEST_CASE("gram structure") {
  RngHandle rng(22);
  MatrixXd x = rng.normal_matrix(6, 2);
  x.row(5) = x.row(2);
  const KernelParams p = KernelParams::from_values(0.8, VectorXd::Constant(2, 0.9), 0.05);
  for (auto f : {KernelFamily::squared_exponential_ard, KernelFamily::matern52_ard}) {
    const KernelSpec s = spec_of(f, 2, true);
    const SpdMatrix k = gram(s, p, x);
    CHECK((k.matrix() - k.matrix().transpose()).norm() == 0.0);
    CHECK(k(5, 5) == doctest::Approx(0.85));
    CHECK(k(2, 5) == doctest::Approx(0.8));
    const MatrixXd c = cross_gram(s, p, x, x);
    CHECK((k.matrix() - c).diagonal().array().abs().maxCoeff() == doctest::Approx(0.05));
    CHECK((k.matrix() - c - 0.05 * MatrixXd::Identity(6, 6)).norm() < 1e-14);
    const SpdMatrix k0 = gram(spec_of(f, 2, false), p, x);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(k0.matrix());
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("gram_grad matches central differences") {
  RngHandle rng(23);
  for (auto f : {KernelFamily::squared_exponential_ard, KernelFamily::matern52_ard}) {
    const KernelSpec s = spec_of(f, 3, true);
    const MatrixXd x = rng.normal_matrix(7, 3);
    KernelParams p = KernelParams::from_values(1.3, (VectorXd(3) << 0.6, 1.1, 2.4).finished(), 0.1);
    const VectorXd v = p.unconstrained(s);
    const auto grads = gram_grad(s, p, x);
    REQUIRE(grads.size() == static_cast<std::size_t>(s.num_params()));
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      const double h = 1e-6;
      VectorXd vp = v, vm = v;
      vp(j) += h;
      vm(j) -= h;
      const MatrixXd fd = (gram(s, KernelParams::from_unconstrained(s, vp), x).matrix() -
                           gram(s, KernelParams::from_unconstrained(s, vm), x).matrix()) /
                          (2.0 * h);
      CHECK((fd - grads[static_cast<std::size_t>(j)]).norm() < 1e-7 * std::max(1.0, fd.norm()));
    }
  }
}

TEST_CASE("parameter round trips and validation") {
  const KernelSpec s = spec_of(KernelFamily::matern52_ard, 2, true);
  const KernelParams p = KernelParams::from_values(2.0, (VectorXd(2) << 0.5, 3.0).finished(), 0.01);
  const KernelParams q = KernelParams::from_unconstrained(s, p.unconstrained(s));
  CHECK(q.amplitude() == doctest::Approx(2.0));
  CHECK(q.noise() == doctest::Approx(0.01));
  CHECK((q.lengthscales() - p.lengthscales()).norm() < 1e-14);
  CHECK(p.unconstrained(spec_of(KernelFamily::matern52_ard, 2, false)).size() == 3);
  CHECK_THROWS_AS(KernelParams::from_values(0.0, VectorXd::Ones(2), 0.1), DomainError);
  CHECK_THROWS_AS(KernelParams::from_values(1.0, -VectorXd::Ones(2), 0.1), DomainError);
  CHECK_THROWS_AS(KernelParams::from_values(1.0, VectorXd::Ones(2), -1.0), DomainError);
  CHECK_THROWS_AS(KernelParams::from_unconstrained(s, VectorXd::Zero(2)), DimensionMismatch);
  CHECK_THROWS_AS(gram(s, p, MatrixXd::Zero(3, 3)), DimensionMismatch);
  CHECK(kernel_family_from_string(to_string(KernelFamily::matern52_ard)) == KernelFamily::matern52_ard);
  CHECK_THROWS_AS(kernel_family_from_string("linear"), DomainError);
}
