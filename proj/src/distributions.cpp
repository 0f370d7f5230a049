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

#include "tprocess/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "tprocess/stats.hpp"

namespace tprocess {

namespace {

void require_nu_above_two(double nu, const char* where) {
  if (!(nu > 2.0) || !std::isfinite(nu)) {
    throw DomainError(std::string(where) + ": degrees of freedom must exceed 2");
  }
}

// Squared Mahalanobis norm of each row of y (count x n) under scale factor f.
std::vector<double> mahalanobis_rows(const MatrixXd& y, const CholFactor& f) {
  MatrixXd half = lower_solve(f, MatrixXd(y.transpose()));
  std::vector<double> out(static_cast<std::size_t>(y.rows()));
  for (Eigen::Index i = 0; i < y.rows(); ++i) out[static_cast<std::size_t>(i)] = half.col(i).squaredNorm();
  return out;
}

std::vector<double> column(const MatrixXd& y, Eigen::Index j) {
  return std::vector<double>(y.col(j).data(), y.col(j).data() + y.rows());
}

}  // namespace

void MvtParams::validate() const {
  require_nu_above_two(nu, "MvtParams");
  if (scale.dim() != phi.size()) throw DimensionMismatch("MvtParams: location and scale sizes differ");
}

SpdMatrix EigenIwSample::reconstruct() const {
  return SpdMatrix::symmetrized(q * lambda.asDiagonal() * q.transpose());
}

double gaussian_log_pdf(const VectorXd& mean, const SpdMatrix& cov, const VectorXd& y) {
  if (mean.size() != y.size() || cov.dim() != y.size()) throw DimensionMismatch("gaussian_log_pdf: size mismatch");
  const CholFactor f = cholesky(cov);
  const double beta = lower_solve(f, VectorXd(y - mean)).squaredNorm();
  const double n = static_cast<double>(y.size());
  return -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * logdet(f) - 0.5 * beta;
}

double mvt_log_pdf_factored(double nu, const CholFactor& scale_factor, const VectorXd& residual) {
  require_nu_above_two(nu, "mvt_log_pdf");
  if (residual.size() != scale_factor.dim()) throw DimensionMismatch("mvt_log_pdf: size mismatch");
  const double n = static_cast<double>(residual.size());
  const double beta = lower_solve(scale_factor, residual).squaredNorm();
  return log_gamma_ratio(0.5 * nu, 0.5 * n) - 0.5 * n * std::log((nu - 2.0) * std::numbers::pi) -
         0.5 * logdet(scale_factor) - 0.5 * (nu + n) * std::log1p(beta / (nu - 2.0));
}

double mvt_log_pdf(const MvtParams& p, const VectorXd& y) {
  p.validate();
  if (y.size() != p.dim()) throw DimensionMismatch("mvt_log_pdf: size mismatch");
  return mvt_log_pdf_factored(p.nu, cholesky(p.scale), y - p.phi);
}

ConditionalMvt mvt_condition(const MvtParams& p, Eigen::Index n1, const VectorXd& y1) {
  p.validate();
  const Eigen::Index n = p.dim();
  if (n1 < 1 || n1 >= n) throw IndexOutOfRange("mvt_condition: need 1 <= n1 < n");
  if (y1.size() != n1) throw DimensionMismatch("mvt_condition: conditioning vector has wrong size");
  const Eigen::Index n2 = n - n1;
  const MatrixXd& k = p.scale.matrix();

  const CholFactor f11 = cholesky(SpdMatrix::symmetrized(k.topLeftCorner(n1, n1)));
  const VectorXd white = lower_solve(f11, VectorXd(y1 - p.phi.head(n1)));
  const MatrixXd cross = lower_solve(f11, MatrixXd(k.topRightCorner(n1, n2)));

  ConditionalMvt out;
  out.beta1 = white.squaredNorm();
  out.scale_factor = (p.nu + out.beta1 - 2.0) / (p.nu + static_cast<double>(n1) - 2.0);
  out.params.nu = p.nu + static_cast<double>(n1);
  out.params.phi = p.phi.tail(n2) + cross.transpose() * white;
  const MatrixXd schur = k.bottomRightCorner(n2, n2) - cross.transpose() * cross;
  out.params.scale = SpdMatrix::symmetrized(out.scale_factor * schur);
  return out;
}

MvtParams mvt_marginal(const MvtParams& p, std::span<const Eigen::Index> indices) {
  const Eigen::Index n = p.dim();
  std::set<Eigen::Index> seen;
  for (Eigen::Index i : indices) {
    if (i < 0 || i >= n) throw IndexOutOfRange("mvt_marginal: index out of range");
    if (!seen.insert(i).second) throw IndexOutOfRange("mvt_marginal: duplicate index");
  }
  if (indices.empty()) throw IndexOutOfRange("mvt_marginal: empty index set");
  const auto m = static_cast<Eigen::Index>(indices.size());
  MvtParams out;
  out.nu = p.nu;
  out.phi.resize(m);
  MatrixXd sub(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    out.phi(a) = p.phi(indices[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < m; ++b) {
      sub(a, b) = p.scale(indices[static_cast<std::size_t>(a)], indices[static_cast<std::size_t>(b)]);
    }
  }
  out.scale = SpdMatrix::symmetrized(sub);
  return out;
}

MatrixXd mvt_sample(const MvtParams& p, Eigen::Index count, RngHandle& rng) {
  p.validate();
  if (count < 1) throw DomainError("mvt_sample: count must be positive");
  const CholFactor f = cholesky(p.scale);
  const Eigen::Index n = p.dim();
  MatrixXd out(count, n);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double r = 1.0 / rng.chi_squared(p.nu);
    const VectorXd z = rng.normal_vector(n);
    out.row(i) = (p.phi + std::sqrt(r * (p.nu - 2.0)) * (f.lower * z)).transpose();
  }
  return out;
}

double student1_log_pdf(double nu, double z) {
  require_nu_above_two(nu, "student1_pdf");
  return log_gamma_ratio(0.5 * nu, 0.5) - 0.5 * std::log((nu - 2.0) * std::numbers::pi) -
         0.5 * (nu + 1.0) * std::log1p(z * z / (nu - 2.0));
}

double student1_pdf(double nu, double z) { return std::exp(student1_log_pdf(nu, z)); }

double student1_cdf(double nu, double z) {
  require_nu_above_two(nu, "student1_cdf");
  if (z == 0.0) return 0.5;
  if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
  // Lower tail mass: 0.5 * I_x(nu/2, 1/2) with x = (nu-2)/(nu-2+z^2), written as
  // a complement in 1 - x to avoid cancellation near the centre.
  const double z2 = z * z;
  const double tail = 0.5 * boost::math::ibetac(0.5, 0.5 * nu, z2 / (nu - 2.0 + z2));
  return z < 0.0 ? tail : 1.0 - tail;
}

double student1_quantile(double nu, double p) {
  require_nu_above_two(nu, "student1_quantile");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("student1_quantile: probability outside (0, 1)");
  const boost::math::students_t_distribution<double> t(nu);
  return boost::math::quantile(t, p) * std::sqrt((nu - 2.0) / nu);
}

double inverse_gamma_log_pdf(double shape, double rate, double x) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw DomainError("inverse_gamma_log_pdf: nonpositive parameter");
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - rate / x;
}

double inverse_gamma_cdf(double shape, double rate, double x) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw DomainError("inverse_gamma_cdf: nonpositive parameter");
  if (!(x > 0.0)) return 0.0;
  return boost::math::gamma_q(shape, rate / x);
}

double log_gamma_ratio(double a, double delta) {
  if (!(a > 0.0) || !(delta >= 0.0)) throw DomainError("log_gamma_ratio: need a > 0, delta >= 0");
  const double whole = std::floor(delta);
  const double frac = delta - whole;
  double s = 0.0;
  if (frac == 0.5) {
    s = -std::log(boost::math::tgamma_delta_ratio(a, 0.5));
  } else if (frac != 0.0) {
    s = std::lgamma(a + frac) - std::lgamma(a);
  }
  for (double k = 0.0; k < whole; k += 1.0) s += std::log(a + frac + k);
  return s;
}

double digamma_difference(double a, double delta) {
  if (!(a > 0.0) || !(delta >= 0.0)) throw DomainError("digamma_difference: need a > 0, delta >= 0");
  const double whole = std::floor(delta);
  const double frac = delta - whole;
  double s = 0.0;
  if (frac != 0.0) {
    if (a > 1e4) {
      // Asymptotic expansion of psi, differenced term by term.
      const double b = a + frac;
      s = std::log1p(frac / a) - 0.5 * (1.0 / b - 1.0 / a) - (1.0 / 12.0) * (1.0 / (b * b) - 1.0 / (a * a)) +
          (1.0 / 120.0) * (std::pow(b, -4) - std::pow(a, -4));
    } else {
      s = boost::math::digamma(a + frac) - boost::math::digamma(a);
    }
  }
  for (double k = 0.0; k < whole; k += 1.0) s += 1.0 / (a + frac + k);
  return s;
}

double mv_gamma_ln(Eigen::Index n, double a) {
  if (n < 1) throw DomainError("mv_gamma_ln: dimension must be positive");
  const double nd = static_cast<double>(n);
  if (!(a > 0.5 * (nd - 1.0))) throw DomainError("mv_gamma_ln: argument outside support");
  double s = 0.25 * nd * (nd - 1.0) * std::log(std::numbers::pi);
  for (Eigen::Index j = 1; j <= n; ++j) s += std::lgamma(a + 0.5 * (1.0 - static_cast<double>(j)));
  return s;
}

double iw_log_pdf(const IwParams& p, const SpdMatrix& sigma) {
  const Eigen::Index n = p.base.dim();
  if (sigma.dim() != n) throw DimensionMismatch("iw_log_pdf: size mismatch");
  if (!(p.nu > 0.0)) throw DomainError("iw_log_pdf: nu must be positive");
  const double nd = static_cast<double>(n);
  const double shifted = p.nu + nd - 1.0;
  const CholFactor fk = cholesky(p.base);
  const CholFactor fs = cholesky(sigma);
  const double log_c = 0.5 * shifted * logdet(fk) - 0.5 * shifted * nd * std::numbers::ln2 -
                       mv_gamma_ln(n, 0.5 * shifted);
  // tr(K Sigma^{-1}) = ||L_sigma^{-1} L_K||_F^2
  const double trace = lower_solve(fs, fk.lower).squaredNorm();
  return log_c - 0.5 * (p.nu + 2.0 * nd) * logdet(fs) - 0.5 * trace;
}

SpdMatrix wishart_sample(double nu, const SpdMatrix& base, RngHandle& rng) {
  const Eigen::Index n = base.dim();
  if (!(nu > static_cast<double>(n) - 1.0)) throw DomainError("wishart_sample: nu must exceed n - 1");
  const CholFactor f = cholesky(base);
  MatrixXd a = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(nu - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  const MatrixXd la = f.lower * a;
  return SpdMatrix::symmetrized(la * la.transpose());
}

SpdMatrix iw_sample(const IwParams& p, RngHandle& rng) {
  if (!(p.nu > 0.0)) throw DomainError("iw_sample: nu must be positive");
  const Eigen::Index n = p.base.dim();
  const SpdMatrix precision_base = SpdMatrix::symmetrized(chol_inverse(cholesky(p.base)));
  const SpdMatrix w = wishart_sample(p.nu + static_cast<double>(n) - 1.0, precision_base, rng);
  return SpdMatrix::symmetrized(chol_inverse(cholesky(w)));
}

EigenIwSample iwp_eigen_sample(double nu, Eigen::Index n, RngHandle& rng) {
  if (!(nu > 0.0)) throw DomainError("iwp_eigen_sample: nu must be positive");
  if (n < 1) throw DomainError("iwp_eigen_sample: n must be positive");
  const SpdMatrix sigma = iw_sample(IwParams{nu, SpdMatrix::identity(n)}, rng);
  VectorXd lambda = sym_eigen(sigma).values;
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(lambda(i), lambda(j));
  }
  EigenIwSample out;
  out.q = haar_orthogonal(n, rng);
  out.lambda = std::move(lambda);
  return out;
}

double iw_eigenvalue_log_density(double nu, const VectorXd& lambda) {
  const Eigen::Index n = lambda.size();
  const double nd = static_cast<double>(n);
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lambda(i) > 0.0)) return -std::numeric_limits<double>::infinity();
    s += -0.5 * (nu + 2.0 * nd) * std::log(lambda(i)) - 0.5 / lambda(i);
    for (Eigen::Index j = i + 1; j < n; ++j) s += std::log(std::abs(lambda(i) - lambda(j)));
  }
  return s;
}

std::vector<double> iwp_radial_draws(double nu, Eigen::Index n, Eigen::Index count, RngHandle& rng) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index k = 0; k < count; ++k) {
    const EigenIwSample s = iwp_eigen_sample(nu, n, rng);
    VectorXd u = rng.normal_vector(n);
    u /= u.norm();
    const VectorXd v = s.q * (s.lambda.array().sqrt().matrix().asDiagonal() * u);
    out.push_back(v.squaredNorm() / u.squaredNorm());
  }
  return out;
}

MatrixXd elliptical_sample(const EllipticalSpec& spec, Eigen::Index count, RngHandle& rng) {
  const Eigen::Index n = spec.omega.rows();
  const Eigen::Index d = spec.omega.cols();
  if (spec.mu.size() != n) throw DimensionMismatch("elliptical_sample: mu and omega sizes differ");
  if (d < 1 || Eigen::ColPivHouseholderQR<MatrixXd>(spec.omega).rank() != d) {
    throw DomainError("elliptical_sample: omega must have full column rank");
  }
  if (spec.kind == EllipticalSpec::Kind::student_t) require_nu_above_two(spec.nu, "elliptical_sample");
  if (count < 1) throw DomainError("elliptical_sample: count must be positive");

  MatrixXd out(count, n);
  for (Eigen::Index i = 0; i < count; ++i) {
    VectorXd u = rng.normal_vector(d);
    u /= u.norm();
    const double r1 = rng.chi_squared(static_cast<double>(d));
    double radius = std::sqrt(r1);
    if (spec.kind == EllipticalSpec::Kind::student_t) {
      const double r2 = 1.0 / rng.chi_squared(spec.nu);
      radius = std::sqrt((spec.nu - 2.0) * r1 * r2);
    }
    out.row(i) = (spec.mu + radius * (spec.omega * u)).transpose();
  }
  return out;
}

bool PriorEquivalenceReport::passes(double alpha) const {
  return std::all_of(checks.begin(), checks.end(), [alpha](const KsCheck& c) { return c.p_value > alpha; });
}

PriorEquivalenceReport verify_prior_equivalence(double nu, const SpdMatrix& base, Eigen::Index count,
                                                RngHandle& rng) {
  require_nu_above_two(nu, "verify_prior_equivalence");
  if (count < 1) throw DomainError("verify_prior_equivalence: count must be positive");
  const Eigen::Index n = base.dim();
  const CholFactor fk = cholesky(base);
  const SpdMatrix precision_base = SpdMatrix::symmetrized(chol_inverse(fk));

  RngHandle mix_rng = rng.derive(1);
  RngHandle wishart_rng = rng.derive(2);
  RngHandle direct_rng = rng.derive(3);

  // y1 | r ~ N(0, (nu - 2) r K), 1/r ~ Gamma(nu/2, rate 1/2)
  MatrixXd mixture(count, n);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double r = 1.0 / mix_rng.chi_squared(nu);
    mixture.row(i) = (std::sqrt((nu - 2.0) * r) * (fk.lower * mix_rng.normal_vector(n))).transpose();
  }

  // y2 | Omega ~ N(0, (nu - 2) Omega^{-1}), Omega ~ W_n(nu + n - 1, K^{-1})
  MatrixXd precision(count, n);
  const double wishart_dof = nu + static_cast<double>(n) - 1.0;
  for (Eigen::Index i = 0; i < count; ++i) {
    const CholFactor fo = cholesky(wishart_sample(wishart_dof, precision_base, wishart_rng));
    const VectorXd z = wishart_rng.normal_vector(n);
    const VectorXd y = fo.lower.transpose().triangularView<Eigen::Upper>().solve(z);
    precision.row(i) = (std::sqrt(nu - 2.0) * y).transpose();
  }

  const MatrixXd direct = mvt_sample(MvtParams{nu, VectorXd::Zero(n), base}, count, direct_rng);

  PriorEquivalenceReport report;
  report.nu = nu;
  report.dim = n;
  report.count = count;
  const std::pair<const char*, const MatrixXd*> sets[] = {
      {"inverse_gamma", &mixture}, {"wishart", &precision}, {"direct", &direct}};
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      const std::string prefix = std::string(sets[a].first) + "_vs_" + sets[b].first;
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto ks = stats::ks_two_sample(column(*sets[a].second, j), column(*sets[b].second, j));
        report.checks.push_back({prefix + "_coord" + std::to_string(j), ks.statistic, ks.p_value});
      }
      const auto ks = stats::ks_two_sample(mahalanobis_rows(*sets[a].second, fk), mahalanobis_rows(*sets[b].second, fk));
      report.checks.push_back({prefix + "_radius", ks.statistic, ks.p_value});
    }
  }
  return report;
}

}  // namespace tprocess
