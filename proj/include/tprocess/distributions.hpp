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

#include <span>
#include <string>
#include <vector>

#include "tprocess/numerics.hpp"

namespace tprocess {

/// Multivariate Student-t in the covariance parameterization: for
/// y ~ MVT(nu, phi, scale), E[y] = phi and cov[y] = scale. Requires nu > 2.
struct MvtParams {
  double nu = 0.0;
  VectorXd phi;
  SpdMatrix scale;

  Eigen::Index dim() const { return phi.size(); }
  void validate() const;
};

/// Conditional of the trailing block given the leading n1 coordinates.
struct ConditionalMvt {
  MvtParams params;
  /// Mahalanobis statistic of the conditioning block.
  double beta1 = 0.0;
  /// (nu + beta1 - 2) / (nu + n1 - 2), already folded into params.scale.
  double scale_factor = 1.0;
};

/// Inverse Wishart IW_n(nu, base) in Dawid's parameterization; E = base / (nu - 2).
struct IwParams {
  double nu = 0.0;
  SpdMatrix base;
};

/// Inverse Wishart draw represented as q * diag(lambda) * q^T.
struct EigenIwSample {
  MatrixXd q;
  VectorXd lambda;

  SpdMatrix reconstruct() const;
};

struct EllipticalSpec {
  enum class Kind { gaussian, student_t };
  Kind kind = Kind::gaussian;
  double nu = 0.0;
  VectorXd mu;
  /// n x d with full column rank d.
  MatrixXd omega;
};

double gaussian_log_pdf(const VectorXd& mean, const SpdMatrix& cov, const VectorXd& y);

double mvt_log_pdf(const MvtParams& p, const VectorXd& y);

/// Log density from a precomputed factor of the scale and the residual y - phi.
/// Shared with the process marginal likelihood.
double mvt_log_pdf_factored(double nu, const CholFactor& scale_factor, const VectorXd& residual);

ConditionalMvt mvt_condition(const MvtParams& p, Eigen::Index n1, const VectorXd& y1);

MvtParams mvt_marginal(const MvtParams& p, std::span<const Eigen::Index> indices);

/// count x n matrix, one draw per row, from the inverse-Gamma scale mixture
/// y = phi + sqrt(r (nu - 2)) L z with 1/r ~ Gamma(nu/2, rate 1/2).
MatrixXd mvt_sample(const MvtParams& p, Eigen::Index count, RngHandle& rng);

/// Unit-variance Student-t with nu degrees of freedom (classical t scaled by
/// sqrt((nu - 2) / nu)).
double student1_log_pdf(double nu, double z);
double student1_pdf(double nu, double z);
double student1_cdf(double nu, double z);
double student1_quantile(double nu, double p);

/// Inverse-Gamma with shape/rate: density proportional to x^{-shape-1} exp(-rate / x).
double inverse_gamma_log_pdf(double shape, double rate, double x);
double inverse_gamma_cdf(double shape, double rate, double x);

double iw_log_pdf(const IwParams& p, const SpdMatrix& sigma);

/// Bartlett-decomposition draw from W_n(nu, base); requires nu > n - 1.
SpdMatrix wishart_sample(double nu, const SpdMatrix& base, RngHandle& rng);

/// Draws W ~ W_n(nu + n - 1, base^{-1}) and returns W^{-1}.
SpdMatrix iw_sample(const IwParams& p, RngHandle& rng);

/// Eigenvalues of an IW_n(nu, I) draw, put in uniformly random order, paired
/// with an independent Haar-distributed orthogonal matrix.
EigenIwSample iwp_eigen_sample(double nu, Eigen::Index n, RngHandle& rng);

/// Unnormalized log density of the IW_n(nu, I) eigenvalues (exchangeable).
double iw_eigenvalue_log_density(double nu, const VectorXd& lambda);

/// ||Q Lambda^{1/2} u||^2 for u uniform on the unit sphere, (Q, Lambda) from
/// iwp_eigen_sample. Distributed as InverseGamma(nu/2, 1/2).
std::vector<double> iwp_radial_draws(double nu, Eigen::Index n, Eigen::Index count, RngHandle& rng);

MatrixXd elliptical_sample(const EllipticalSpec& spec, Eigen::Index count, RngHandle& rng);

/// log Gamma(a + delta) - log Gamma(a) for delta >= 0. Exact recurrence on
/// the integer part of delta, so it stays accurate for very large a.
double log_gamma_ratio(double a, double delta);
/// psi(a + delta) - psi(a), same contract as log_gamma_ratio.
double digamma_difference(double a, double delta);

/// log Gamma_n(a), requires a > (n - 1) / 2.
double mv_gamma_ln(Eigen::Index n, double a);

struct KsCheck {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
};

struct PriorEquivalenceReport {
  double nu = 0.0;
  Eigen::Index dim = 0;
  Eigen::Index count = 0;
  std::vector<KsCheck> checks;

  bool passes(double alpha = 0.01) const;
};

/// Compares the inverse-Gamma scale mixture, the Wishart precision mixture and
/// direct MVT draws with pairwise two-sample KS tests per coordinate and on
/// Mahalanobis radii.
PriorEquivalenceReport verify_prior_equivalence(double nu, const SpdMatrix& base, Eigen::Index count,
                                                RngHandle& rng);

}  // namespace tprocess
