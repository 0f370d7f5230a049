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

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "tprocess/error.hpp"

namespace tprocess {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Dense symmetric matrix. Construction rejects inputs that are not symmetric
/// to 1e-12 relative and stores the exactly symmetrized average.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(MatrixXd m);

  /// Symmetrizes without the tolerance check. For matrices produced by
  /// arithmetic that is symmetric in exact arithmetic.
  static SpdMatrix symmetrized(const MatrixXd& m);
  static SpdMatrix identity(Eigen::Index n);

  Eigen::Index dim() const { return m_.rows(); }
  const MatrixXd& matrix() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  struct Unchecked {};
  SpdMatrix(MatrixXd m, Unchecked) : m_(std::move(m)) {}
  MatrixXd m_;
};

/// Lower Cholesky factor of a (possibly jittered) SPD matrix.
struct CholFactor {
  MatrixXd lower;
  double jitter_applied = 0.0;

  Eigen::Index dim() const { return lower.rows(); }
};

/// Seeded random stream. Move-only so a stream is never silently duplicated;
/// use derive() to spawn an independent stream.
class RngHandle {
 public:
  explicit RngHandle(std::uint64_t seed);
  RngHandle(const RngHandle&) = delete;
  RngHandle& operator=(const RngHandle&) = delete;
  RngHandle(RngHandle&&) = default;
  RngHandle& operator=(RngHandle&&) = default;

  std::uint64_t seed() const { return seed_; }

  /// Independent stream keyed by (seed, stream).
  RngHandle derive(std::uint64_t stream) const;

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Gamma with the given shape and scale.
  double gamma(double shape, double scale);
  double chi_squared(double dof);
  std::uint64_t next_u64() { return engine_(); }

  VectorXd normal_vector(Eigen::Index n);
  MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Mixes a 64-bit value (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t x);

/// Cholesky with a jitter ladder: on failure, eps * mean(diag) is added to the
/// diagonal for eps in {1e-10, 1e-8, 1e-6}. Throws NotPositiveDefinite beyond.
CholFactor cholesky(const SpdMatrix& m);

VectorXd chol_solve(const CholFactor& f, const VectorXd& b);
MatrixXd chol_solve(const CholFactor& f, const MatrixXd& b);

/// Returns L^{-1} b.
VectorXd lower_solve(const CholFactor& f, const VectorXd& b);
MatrixXd lower_solve(const CholFactor& f, const MatrixXd& b);

/// Inverse of the factored matrix.
MatrixXd chol_inverse(const CholFactor& f);

double logdet(const CholFactor& f);

struct SymEigen {
  VectorXd values;   // descending
  MatrixXd vectors;  // orthonormal columns
};

/// Eigenvalues in descending order. Each eigenvector is signed so its first
/// non-negligible component is positive; equal eigenvalues are ordered by
/// the lexicographic order of their eigenvectors.
SymEigen sym_eigen(const SpdMatrix& m);

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// columns of Q multiplied by sign(diag(R)).
MatrixXd haar_orthogonal(Eigen::Index n, RngHandle& rng);

}  // namespace tprocess
