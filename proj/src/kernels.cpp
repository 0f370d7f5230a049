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

#include "tprocess/kernels.hpp"

#include <cmath>

namespace tprocess {

namespace {

void check_dim(const KernelSpec& spec, const KernelParams& params, Eigen::Index cols) {
  if (spec.input_dim < 1) throw DomainError("kernel: input dimension must be positive");
  if (params.log_lengthscales.size() != spec.input_dim) throw DimensionMismatch("kernel: wrong number of lengthscales");
  if (cols != spec.input_dim) throw DimensionMismatch("kernel: input has wrong dimension");
  if (!std::isfinite(params.log_amplitude) || !params.log_lengthscales.allFinite()) {
    throw DomainError("kernel: parameters must be positive and finite");
  }
  if (spec.include_noise && !std::isfinite(params.log_noise)) throw DomainError("kernel: noise must be positive");
}

// Profile k(r^2) / amplitude.
double profile(KernelFamily family, double r2) {
  switch (family) {
    case KernelFamily::squared_exponential_ard:
      return std::exp(-0.5 * r2);
    case KernelFamily::matern52_ard: {
      // (1 + sqrt(5 r^2)) exp(-sqrt(5 r^2)); no 5 r^2 / 3 term in this form.
      const double s = std::sqrt(5.0 * r2);
      return (1.0 + s) * std::exp(-s);
    }
  }
  return 0.0;
}

// d profile / d r^2, times -2, so that d k / d log(theta_d) = amp * w * dd^2 / theta_d^2.
double profile_weight(KernelFamily family, double r2) {
  switch (family) {
    case KernelFamily::squared_exponential_ard:
      return std::exp(-0.5 * r2);
    case KernelFamily::matern52_ard:
      return 5.0 * std::exp(-std::sqrt(5.0 * r2));
  }
  return 0.0;
}

template <typename A, typename B>
double scaled_sqdist(const A& x, const B& y, const VectorXd& inv_ls2) {
  double r2 = 0.0;
  for (Eigen::Index d = 0; d < inv_ls2.size(); ++d) {
    const double diff = x(d) - y(d);
    r2 += diff * diff * inv_ls2(d);
  }
  return r2;
}

VectorXd inverse_sq_lengthscales(const KernelParams& p) { return (-2.0 * p.log_lengthscales.array()).exp().matrix(); }

}  // namespace

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "squared_exponential_ard") return KernelFamily::squared_exponential_ard;
  if (name == "matern52_ard") return KernelFamily::matern52_ard;
  throw DomainError("unknown kernel family '" + name + "'");
}

std::string to_string(KernelFamily family) {
  return family == KernelFamily::squared_exponential_ard ? "squared_exponential_ard" : "matern52_ard";
}

KernelParams KernelParams::from_values(double amplitude, const VectorXd& lengthscales, double noise) {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw DomainError("kernel: amplitude must be positive");
  if (lengthscales.size() == 0 || !(lengthscales.array() > 0.0).all() || !lengthscales.allFinite()) {
    throw DomainError("kernel: lengthscales must be positive");
  }
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw DomainError("kernel: noise must be nonnegative");
  KernelParams p;
  p.log_amplitude = std::log(amplitude);
  p.log_lengthscales = lengthscales.array().log().matrix();
  p.log_noise = std::log(noise);
  return p;
}

double KernelParams::amplitude() const { return std::exp(log_amplitude); }
VectorXd KernelParams::lengthscales() const { return log_lengthscales.array().exp().matrix(); }
double KernelParams::noise() const { return std::exp(log_noise); }

VectorXd KernelParams::unconstrained(const KernelSpec& spec) const {
  VectorXd v(spec.num_params());
  v(0) = log_amplitude;
  v.segment(1, spec.input_dim) = log_lengthscales;
  if (spec.include_noise) v(spec.input_dim + 1) = log_noise;
  return v;
}

KernelParams KernelParams::from_unconstrained(const KernelSpec& spec, const VectorXd& v) {
  if (v.size() != spec.num_params()) throw DimensionMismatch("kernel: wrong number of parameters");
  KernelParams p;
  p.log_amplitude = v(0);
  p.log_lengthscales = v.segment(1, spec.input_dim);
  p.log_noise = spec.include_noise ? v(spec.input_dim + 1) : -std::numeric_limits<double>::infinity();
  return p;
}

double kernel_eval(const KernelSpec& spec, const KernelParams& params, const VectorXd& x, const VectorXd& x2,
                   bool same_point) {
  check_dim(spec, params, x.size());
  if (x2.size() != x.size()) throw DimensionMismatch("kernel: inputs differ in dimension");
  const double r2 = scaled_sqdist(x, x2, inverse_sq_lengthscales(params));
  double k = params.amplitude() * profile(spec.family, r2);
  if (same_point && spec.include_noise) k += params.noise();
  return k;
}

MatrixXd cross_gram(const KernelSpec& spec, const KernelParams& params, const MatrixXd& a, const MatrixXd& b) {
  check_dim(spec, params, a.cols());
  if (b.cols() != a.cols()) throw DimensionMismatch("kernel: inputs differ in dimension");
  const VectorXd inv_ls2 = inverse_sq_lengthscales(params);
  const double amp = params.amplitude();
  MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      k(i, j) = amp * profile(spec.family, scaled_sqdist(a.row(i), b.row(j), inv_ls2));
    }
  }
  return k;
}

SpdMatrix gram(const KernelSpec& spec, const KernelParams& params, const MatrixXd& x) {
  check_dim(spec, params, x.cols());
  if (x.rows() < 1) throw DimensionMismatch("gram: no inputs");
  const VectorXd inv_ls2 = inverse_sq_lengthscales(params);
  const double amp = params.amplitude();
  const Eigen::Index n = x.rows();
  MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = amp;
    for (Eigen::Index i = 0; i < j; ++i) {
      k(i, j) = amp * profile(spec.family, scaled_sqdist(x.row(i), x.row(j), inv_ls2));
      k(j, i) = k(i, j);
    }
  }
  if (spec.include_noise) k.diagonal().array() += params.noise();
  return SpdMatrix::symmetrized(k);
}

std::vector<MatrixXd> gram_grad(const KernelSpec& spec, const KernelParams& params, const MatrixXd& x) {
  check_dim(spec, params, x.cols());
  const Eigen::Index n = x.rows();
  const Eigen::Index dim = spec.input_dim;
  const VectorXd inv_ls2 = inverse_sq_lengthscales(params);
  const double amp = params.amplitude();

  std::vector<MatrixXd> grads(static_cast<std::size_t>(spec.num_params()), MatrixXd::Zero(n, n));
  for (Eigen::Index j = 0; j < n; ++j) {
    grads[0](j, j) = amp;
    for (Eigen::Index i = 0; i < j; ++i) {
      const double r2 = scaled_sqdist(x.row(i), x.row(j), inv_ls2);
      const double k = amp * profile(spec.family, r2);
      const double w = amp * profile_weight(spec.family, r2);
      grads[0](i, j) = grads[0](j, i) = k;
      for (Eigen::Index d = 0; d < dim; ++d) {
        const double diff = x(i, d) - x(j, d);
        const double g = w * diff * diff * inv_ls2(d);
        grads[static_cast<std::size_t>(d + 1)](i, j) = g;
        grads[static_cast<std::size_t>(d + 1)](j, i) = g;
      }
    }
  }
  if (spec.include_noise) {
    grads.back().diagonal().setConstant(params.noise());
  }
  return grads;
}

}  // namespace tprocess
