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

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "support.hpp"
#include "tprocess/numerics.hpp"
#include "tprocess/stats.hpp"

using namespace tprocess;
using tprocess::testing::random_spd;

TEST_CASE("SpdMatrix validates shape and symmetry") {
  CHECK_THROWS_AS(SpdMatrix(MatrixXd::Ones(2, 3)), DimensionMismatch);
  CHECK_THROWS_AS(SpdMatrix(MatrixXd(0, 0)), DimensionMismatch);
  MatrixXd a(2, 2);
  a << 1.0, 0.5, 0.4, 1.0;
  CHECK_THROWS_AS(SpdMatrix{a}, DomainError);
  a(1, 0) = 0.5 + 1e-15;
  const SpdMatrix s(a);
  CHECK(s(0, 1) == s(1, 0));
  a(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SpdMatrix{a}, DomainError);
}

TEST_CASE("cholesky reconstructs and solves") {
  RngHandle rng(1);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 1 + t % 9;
    const MatrixXd a = random_spd(n, rng);
    const CholFactor f = cholesky(SpdMatrix(a));
    CHECK(f.jitter_applied == 0.0);
    CHECK((f.lower * f.lower.transpose() - a).norm() < 1e-10 * a.norm());
    const VectorXd b = rng.normal_vector(n);
    CHECK((a * chol_solve(f, b) - b).norm() < 1e-9 * b.norm());
    CHECK((chol_inverse(f) * a - MatrixXd::Identity(n, n)).norm() < 1e-9);
    CHECK(logdet(f) == doctest::Approx(std::log(a.determinant())).epsilon(1e-10));
    CHECK((f.lower * lower_solve(f, b) - b).norm() < 1e-10 * b.norm());
  }
}

TEST_CASE("cholesky jitter ladder") {
  const MatrixXd nearly = MatrixXd::Ones(4, 4) - 1e-12 * MatrixXd::Identity(4, 4);
  const CholFactor f = cholesky(SpdMatrix(nearly));
  CHECK(f.jitter_applied > 0.0);
  CHECK(f.jitter_applied <= 1e-6);
  CHECK_THROWS_AS(cholesky(SpdMatrix(MatrixXd(-MatrixXd::Identity(3, 3)))), NotPositiveDefinite);
}

TEST_CASE("sym_eigen ordering and sign convention") {
  RngHandle rng(2);
  const MatrixXd a = random_spd(5, rng);
  const SymEigen e = sym_eigen(SpdMatrix(a));
  for (Eigen::Index i = 1; i < 5; ++i) CHECK(e.values(i - 1) >= e.values(i));
  CHECK((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - a).norm() < 1e-10 * a.norm());
  for (Eigen::Index j = 0; j < 5; ++j) {
    Eigen::Index k = 0;
    while (std::abs(e.vectors(k, j)) <= 1e-12) ++k;
    CHECK(e.vectors(k, j) > 0.0);
  }
  const SymEigen id = sym_eigen(SpdMatrix::identity(3));
  CHECK((id.vectors.array().abs().colwise().sum() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK((id.vectors.array().abs().rowwise().sum() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("haar_orthogonal is orthogonal with the Haar first-entry law") {
  RngHandle rng(3);
  const Eigen::Index n = 4;
  std::vector<double> sq;
  for (int t = 0; t < 4000; ++t) {
    const MatrixXd q = haar_orthogonal(n, rng);
    if (t < 10) CHECK((q.transpose() * q - MatrixXd::Identity(n, n)).norm() < 1e-12);
    sq.push_back(q(0, 0) * q(0, 0));
  }
  // Squared entry of a uniform unit vector in R^n is Beta(1/2, (n-1)/2).
  const boost::math::beta_distribution<double> beta(0.5, 0.5 * (n - 1));
  const auto ks = stats::ks_one_sample(sq, [&](double x) { return boost::math::cdf(beta, x); });
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("RngHandle streams") {
  RngHandle a(42);
  RngHandle b(42);
  for (int i = 0; i < 5; ++i) CHECK(a.next_u64() == b.next_u64());
  RngHandle c = RngHandle(42).derive(1);
  RngHandle d = RngHandle(42).derive(2);
  CHECK(c.next_u64() != d.next_u64());
  CHECK(RngHandle(42).derive(1).next_u64() == RngHandle(42).derive(1).next_u64());

  RngHandle r(7);
  std::vector<double> u, z, g;
  for (int i = 0; i < 20000; ++i) {
    const double x = r.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
    u.push_back(x);
    z.push_back(r.normal());
    g.push_back(r.gamma(2.5, 1.5));
  }
  CHECK(stats::ks_one_sample(u, [](double x) { return x; }).p_value > 0.01);
  const boost::math::normal_distribution<double> nd;
  CHECK(stats::ks_one_sample(z, [&](double x) { return boost::math::cdf(nd, x); }).p_value > 0.01);
  const boost::math::gamma_distribution<double> gd(2.5, 1.5);
  CHECK(stats::ks_one_sample(g, [&](double x) { return boost::math::cdf(gd, x); }).p_value > 0.01);
}

TEST_CASE("mix_seed spreads nearby seeds") {
  CHECK(mix_seed(0) != mix_seed(1));
  CHECK(mix_seed(1) != mix_seed(2));
  CHECK(mix_seed(12345) == mix_seed(12345));
}
