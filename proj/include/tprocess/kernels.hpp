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

#include <string>
#include <vector>

#include "tprocess/numerics.hpp"

namespace tprocess {

enum class KernelFamily { squared_exponential_ard, matern52_ard };

KernelFamily kernel_family_from_string(const std::string& name);
std::string to_string(KernelFamily family);

struct KernelSpec {
  KernelFamily family = KernelFamily::squared_exponential_ard;
  Eigen::Index input_dim = 1;
  bool include_noise = false;

  /// Number of unconstrained kernel parameters: amplitude, D lengthscales and
  /// the noise variance when include_noise is set.
  Eigen::Index num_params() const { return 1 + input_dim + (include_noise ? 1 : 0); }
};

/// Kernel hyperparameters held as logs of the positive quantities.
struct KernelParams {
  double log_amplitude = 0.0;
  VectorXd log_lengthscales;
  /// Log variance of the diagonal (delta) kernel; ignored unless the spec
  /// includes noise.
  double log_noise = 0.0;

  static KernelParams from_values(double amplitude, const VectorXd& lengthscales, double noise);

  double amplitude() const;
  VectorXd lengthscales() const;
  double noise() const;

  VectorXd unconstrained(const KernelSpec& spec) const;
  static KernelParams from_unconstrained(const KernelSpec& spec, const VectorXd& v);
};

/// k(x, x2), plus the noise variance iff same_point and the spec includes noise.
double kernel_eval(const KernelSpec& spec, const KernelParams& params, const VectorXd& x, const VectorXd& x2,
                   bool same_point);

/// Cross-covariance between the rows of a and b. Never includes noise.
MatrixXd cross_gram(const KernelSpec& spec, const KernelParams& params, const MatrixXd& a, const MatrixXd& b);

/// Gram matrix of the rows of x; each row is its own observation, so the noise
/// variance lands on the diagonal even for duplicated inputs.
SpdMatrix gram(const KernelSpec& spec, const KernelParams& params, const MatrixXd& x);

/// dK / d(unconstrained parameter) in the order of KernelParams::unconstrained.
std::vector<MatrixXd> gram_grad(const KernelSpec& spec, const KernelParams& params, const MatrixXd& x);

}  // namespace tprocess
