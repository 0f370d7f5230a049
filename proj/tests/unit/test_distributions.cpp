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

#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "support.hpp"
#include "tprocess/distributions.hpp"
#include "tprocess/stats.hpp"

using namespace tprocess;
using tprocess::testing::random_spd;
using tprocess::testing::rel_err;

namespace {

double direct_mvt(double nu, const VectorXd& phi, const MatrixXd& k, const VectorXd& y) {
  const double n = static_cast<double>(y.size());
  const VectorXd r = y - phi;
  const double beta = r.dot(k.inverse() * r);
  return std::lgamma(0.5 * (nu + n)) - std::lgamma(0.5 * nu) - 0.5 * n * std::log((nu - 2.0) * std::numbers::pi) -
         0.5 * std::log(k.determinant()) - 0.5 * (nu + n) * std::log1p(beta / (nu - 2.0));
}

// Wishart density of W = Sigma^{-1} with m = nu + n - 1 degrees of freedom and
// scale base^{-1}, times |Sigma|^{-(n+1)}.
double wishart_route_iw(double nu, const MatrixXd& base, const MatrixXd& sigma) {
  const double n = static_cast<double>(base.rows());
  const double m = nu + n - 1.0;
  const MatrixXd w = sigma.inverse();
  double lgn = 0.25 * n * (n - 1.0) * std::log(std::numbers::pi);
  for (int j = 0; j < base.rows(); ++j) lgn += std::lgamma(0.5 * m - 0.5 * j);
  const double log_w = 0.5 * (m - n - 1.0) * std::log(w.determinant()) - 0.5 * (base * w).trace() -
                       0.5 * m * n * std::log(2.0) + 0.5 * m * std::log(base.determinant()) - lgn;
  return log_w - (n + 1.0) * std::log(sigma.determinant());
}

MvtParams random_mvt(Eigen::Index n, double nu, RngHandle& rng) {
  return MvtParams{nu, rng.normal_vector(n), SpdMatrix::symmetrized(random_spd(n, rng))};
}

}  // namespace

TEST_CASE("univariate mvt at the origin") {
  const MvtParams p{3.0, VectorXd::Zero(1), SpdMatrix::identity(1)};
  CHECK(mvt_log_pdf(p, VectorXd::Zero(1)) == doctest::Approx(std::log(2.0 / std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("mvt_log_pdf matches independent formulas") {
  RngHandle rng(11);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = 1 + t % 6;
    const double nu = 2.1 + 20.0 * rng.uniform();
    const MvtParams p = random_mvt(n, nu, rng);
    const VectorXd y = p.phi + rng.normal_vector(n);
    CHECK(rel_err(mvt_log_pdf(p, y), direct_mvt(nu, p.phi, p.scale.matrix(), y)) < 1e-10);
  }
  // n = 1 against the classical t with scale sqrt(k (nu - 2) / nu).
  for (double nu : {2.5, 4.0, 30.0}) {
    const double k = 1.7;
    const double s = std::sqrt(k * (nu - 2.0) / nu);
    const boost::math::students_t_distribution<double> t(nu);
    const MvtParams p{nu, VectorXd::Constant(1, 0.3), SpdMatrix(MatrixXd::Constant(1, 1, k))};
    for (double y : {-4.0, 0.0, 0.7, 9.0}) {
      const double expect = std::log(boost::math::pdf(t, (y - 0.3) / s) / s);
      CHECK(mvt_log_pdf(p, VectorXd::Constant(1, y)) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  const MvtParams bad{2.0, VectorXd::Zero(1), SpdMatrix::identity(1)};
  CHECK_THROWS_AS(mvt_log_pdf(bad, VectorXd::Zero(1)), DomainError);
}

TEST_CASE("conditioning matches explicit formulas and the chain rule") {
  RngHandle rng(12);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index n = 2 + t % 6;
    const Eigen::Index n1 = 1 + t % (n - 1);
    const double nu = 2.5 + 10.0 * rng.uniform();
    const MvtParams p = random_mvt(n, nu, rng);
    const VectorXd y = p.phi + rng.normal_vector(n);
    const Eigen::Index n2 = n - n1;
    const MatrixXd& k = p.scale.matrix();
    const MatrixXd k11inv = k.topLeftCorner(n1, n1).inverse();
    const VectorXd r1 = y.head(n1) - p.phi.head(n1);
    const double beta1 = r1.dot(k11inv * r1);
    const double factor = (nu + beta1 - 2.0) / (nu + static_cast<double>(n1) - 2.0);
    const VectorXd mean = p.phi.tail(n2) + k.bottomLeftCorner(n2, n1) * k11inv * r1;
    const MatrixXd cov =
        factor * (k.bottomRightCorner(n2, n2) - k.bottomLeftCorner(n2, n1) * k11inv * k.topRightCorner(n1, n2));

    const ConditionalMvt c = mvt_condition(p, n1, y.head(n1));
    CHECK(c.params.nu == doctest::Approx(nu + static_cast<double>(n1)));
    CHECK(c.beta1 == doctest::Approx(beta1).epsilon(1e-10));
    CHECK((c.params.phi - mean).norm() < 1e-9 * (1.0 + mean.norm()));
    CHECK((c.params.scale.matrix() - cov).norm() < 1e-9 * cov.norm());

    std::vector<Eigen::Index> head(static_cast<std::size_t>(n1));
    for (Eigen::Index i = 0; i < n1; ++i) head[static_cast<std::size_t>(i)] = i;
    const double joint = mvt_log_pdf(p, y);
    const double chain = mvt_log_pdf(mvt_marginal(p, head), y.head(n1)) + mvt_log_pdf(c.params, y.tail(n2));
    CHECK(std::abs(joint - chain) < 1e-10 * std::max(1.0, std::abs(joint)));
  }
}

TEST_CASE("marginal and condition argument errors") {
  RngHandle rng(13);
  const MvtParams p = random_mvt(3, 5.0, rng);
  const std::vector<Eigen::Index> dup{0, 0};
  const std::vector<Eigen::Index> out{3};
  const std::vector<Eigen::Index> none;
  CHECK_THROWS_AS(mvt_marginal(p, dup), IndexOutOfRange);
  CHECK_THROWS_AS(mvt_marginal(p, out), IndexOutOfRange);
  CHECK_THROWS_AS(mvt_marginal(p, none), IndexOutOfRange);
  CHECK_THROWS_AS(mvt_condition(p, 3, VectorXd::Zero(3)), IndexOutOfRange);
  CHECK_THROWS_AS(mvt_condition(p, 1, VectorXd::Zero(2)), DimensionMismatch);
  const std::vector<Eigen::Index> swap{2, 0};
  const MvtParams m = mvt_marginal(p, swap);
  CHECK(m.phi(0) == p.phi(2));
  CHECK(m.scale(0, 1) == p.scale(2, 0));
}

TEST_CASE("mvt_sample moments and marginal law") {
  RngHandle rng(14);
  const double nu = 9.0;
  const MvtParams p = random_mvt(3, nu, rng);
  const Eigen::Index count = 100000;
  const MatrixXd draws = mvt_sample(p, count, rng);
  const VectorXd mean = draws.colwise().mean().transpose();
  const MatrixXd centered = draws.rowwise() - mean.transpose();
  const MatrixXd cov = centered.transpose() * centered / static_cast<double>(count - 1);
  CHECK((mean - p.phi).norm() < 0.05 * std::sqrt(p.scale.matrix().trace()));
  CHECK((cov - p.scale.matrix()).norm() < 0.05 * p.scale.matrix().norm());
  std::vector<double> z(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    z[static_cast<std::size_t>(i)] = (draws(i, 1) - p.phi(1)) / std::sqrt(p.scale(1, 1));
  }
  CHECK(stats::ks_one_sample(z, [&](double v) { return student1_cdf(nu, v); }).p_value > 0.01);
}

TEST_CASE("unit-variance Student-t helpers") {
  for (double nu : {2.2, 3.0, 7.5, 50.0}) {
    const boost::math::students_t_distribution<double> t(nu);
    const double s = std::sqrt((nu - 2.0) / nu);
    for (double z : {-3.0, -0.4, 0.0, 1.1, 5.0}) {
      const double quad = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [nu](double u) { return student1_pdf(nu, u); }, -std::numeric_limits<double>::infinity(), z, 15, 1e-13);
      CHECK(student1_cdf(nu, z) == doctest::Approx(quad).epsilon(1e-8));
      CHECK(student1_cdf(nu, z) == doctest::Approx(boost::math::cdf(t, z / s)).epsilon(1e-12));
    }
    for (double q : {0.01, 0.3, 0.5, 0.99}) CHECK(student1_cdf(nu, student1_quantile(nu, q)) == doctest::Approx(q));
  }
  CHECK_THROWS_AS(student1_quantile(5.0, 1.0), DomainError);
}

TEST_CASE("inverse gamma against Boost") {
  const boost::math::inverse_gamma_distribution<double> ig(2.5, 0.7);
  for (double x : {0.05, 0.3, 1.0, 4.0}) {
    CHECK(inverse_gamma_log_pdf(2.5, 0.7, x) == doctest::Approx(std::log(boost::math::pdf(ig, x))).epsilon(1e-12));
    CHECK(inverse_gamma_cdf(2.5, 0.7, x) == doctest::Approx(boost::math::cdf(ig, x)).epsilon(1e-12));
  }
}

TEST_CASE("inverse Wishart density") {
  RngHandle rng(15);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 1 + t % 4;
    const double nu = 0.5 + 8.0 * rng.uniform();
    const MatrixXd base = random_spd(n, rng);
    const MatrixXd sigma = random_spd(n, rng);
    const double got = iw_log_pdf(IwParams{nu, SpdMatrix::symmetrized(base)}, SpdMatrix::symmetrized(sigma));
    CHECK(rel_err(got, wishart_route_iw(nu, base, sigma)) < 1e-9);
  }
  // n = 1 reduces to InverseGamma(nu / 2, phi / 2).
  const boost::math::inverse_gamma_distribution<double> ig(2.0, 0.75);
  const double got = iw_log_pdf(IwParams{4.0, SpdMatrix(MatrixXd::Constant(1, 1, 1.5))},
                                SpdMatrix(MatrixXd::Constant(1, 1, 0.9)));
  CHECK(got == doctest::Approx(std::log(boost::math::pdf(ig, 0.9))).epsilon(1e-12));
}

TEST_CASE("Wishart and inverse Wishart sample means") {
  RngHandle rng(16);
  const MatrixXd base = random_spd(3, rng);
  const int count = 20000;
  MatrixXd wsum = MatrixXd::Zero(3, 3);
  MatrixXd isum = MatrixXd::Zero(3, 3);
  std::vector<double> diag;
  for (int i = 0; i < count; ++i) {
    wsum += wishart_sample(6.0, SpdMatrix::symmetrized(base), rng).matrix();
    const SpdMatrix s = iw_sample(IwParams{8.0, SpdMatrix::symmetrized(base)}, rng);
    isum += s.matrix();
    diag.push_back(s(0, 0));
  }
  CHECK((wsum / count - 6.0 * base).norm() < 0.05 * (6.0 * base).norm());
  CHECK((isum / count - base / 6.0).norm() < 0.05 * (base / 6.0).norm());
  // Diagonal block of IW_n(nu, B) is IW_1(nu, B_11).
  const boost::math::inverse_gamma_distribution<double> ig(4.0, 0.5 * base(0, 0));
  CHECK(stats::ks_one_sample(diag, [&](double x) { return boost::math::cdf(ig, x); }).p_value > 0.01);
  CHECK_THROWS_AS(wishart_sample(1.5, SpdMatrix::identity(3), rng), DomainError);
}

TEST_CASE("eigen-represented inverse Wishart") {
  RngHandle rng(17);
  const double nu = 5.0;
  std::vector<double> diag;
  for (int i = 0; i < 5000; ++i) {
    const EigenIwSample s = iwp_eigen_sample(nu, 4, rng);
    if (i < 10) {
      CHECK((s.q.transpose() * s.q - MatrixXd::Identity(4, 4)).norm() < 1e-12);
      CHECK((s.lambda.array() > 0.0).all());
    }
    diag.push_back(s.reconstruct()(2, 2));
  }
  const boost::math::inverse_gamma_distribution<double> ig(0.5 * nu, 0.5);
  const auto cdf = [&](double x) { return boost::math::cdf(ig, x); };
  CHECK(stats::ks_one_sample(diag, cdf).p_value > 0.01);
  CHECK(stats::ks_one_sample(iwp_radial_draws(nu, 4, 5000, rng), cdf).p_value > 0.01);

  VectorXd lambda(4);
  lambda << 0.3, 2.0, 0.7, 1.1;
  VectorXd perm(4);
  perm << 1.1, 0.3, 2.0, 0.7;
  CHECK(iw_eigenvalue_log_density(nu, lambda) == doctest::Approx(iw_eigenvalue_log_density(nu, perm)));
}

TEST_CASE("elliptical samples") {
  RngHandle rng(18);
  EllipticalSpec spec;
  spec.mu = VectorXd::LinSpaced(3, -1.0, 1.0);
  spec.omega = rng.normal_matrix(3, 2);
  for (auto kind : {EllipticalSpec::Kind::gaussian, EllipticalSpec::Kind::student_t}) {
    spec.kind = kind;
    spec.nu = 6.0;
    const Eigen::Index count = 100000;
    const MatrixXd draws = elliptical_sample(spec, count, rng);
    const VectorXd mean = draws.colwise().mean().transpose();
    const MatrixXd centered = draws.rowwise() - mean.transpose();
    const MatrixXd cov = centered.transpose() * centered / static_cast<double>(count - 1);
    const MatrixXd target = spec.omega * spec.omega.transpose();
    CHECK((mean - spec.mu).norm() < 0.05 * std::sqrt(target.trace()));
    CHECK((cov - target).norm() < 0.05 * target.norm());
    // Residuals lie in the column space of omega.
    const MatrixXd proj = spec.omega * spec.omega.completeOrthogonalDecomposition().pseudoInverse();
    const VectorXd r = draws.row(0).transpose() - spec.mu;
    CHECK((proj * r - r).norm() < 1e-10 * (1.0 + r.norm()));
  }
  spec.omega.col(1) = 2.0 * spec.omega.col(0);
  CHECK_THROWS_AS(elliptical_sample(spec, 10, rng), DomainError);
}

TEST_CASE("gamma ratio helpers at large arguments") {
  // mpmath at 50 digits.
  CHECK(log_gamma_ratio(5e7, 0.5) == doctest::Approx(8.86376677919621).epsilon(1e-13));
  CHECK(log_gamma_ratio(1e9, 7.5) == doctest::Approx(155.4244938014731).epsilon(1e-13));
  CHECK(log_gamma_ratio(123456.7, 3.0) == doctest::Approx(35.17096159871056).epsilon(1e-13));
  CHECK(digamma_difference(5e7, 0.5) == doctest::Approx(1.000000005e-08).epsilon(1e-10));
  CHECK(digamma_difference(1e9, 7.5) == doctest::Approx(7.499999975625e-09).epsilon(1e-10));
  CHECK(digamma_difference(123456.7, 3.0) == doctest::Approx(2.429982091138275e-05).epsilon(1e-12));
  for (double a : {0.3, 2.0, 17.5, 900.0}) {
    for (double d : {0.0, 0.25, 0.5, 3.0, 4.7}) {
      CHECK(log_gamma_ratio(a, d) == doctest::Approx(std::lgamma(a + d) - std::lgamma(a)).epsilon(1e-11));
      CHECK(digamma_difference(a, d) ==
            doctest::Approx(boost::math::digamma(a + d) - boost::math::digamma(a)).epsilon(1e-11));
    }
  }
  CHECK_THROWS_AS(log_gamma_ratio(1.0, -0.5), DomainError);
}

TEST_CASE("multivariate gamma identities") {
  RngHandle rng(19);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = 1 + t % 7;
    const double a = 0.5 * static_cast<double>(n) + 10.0 * rng.uniform();
    CHECK(mv_gamma_ln(1, a) == doctest::Approx(std::lgamma(a)).epsilon(1e-14));
    if (n > 1) {
      // Gamma_n(a) = pi^{(n-1)/2} Gamma(a) Gamma_{n-1}(a - 1/2)
      const double rec = 0.5 * static_cast<double>(n - 1) * std::log(std::numbers::pi) + std::lgamma(a) +
                         mv_gamma_ln(n - 1, a - 0.5);
      CHECK(mv_gamma_ln(n, a) == doctest::Approx(rec).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(mv_gamma_ln(3, 0.9), DomainError);
}

TEST_CASE("scale mixture, Wishart mixture and direct draws agree") {
  RngHandle rng(20);
  const PriorEquivalenceReport r = verify_prior_equivalence(5.0, SpdMatrix::identity(2), 10000, rng);
  CHECK(!r.checks.empty());
  CHECK(r.passes(0.001));
}
