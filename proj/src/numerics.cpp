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

#include "tprocess/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace tprocess {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr std::array<double, 3> kJitterLadder = {1e-10, 1e-8, 1e-6};

// Eigen::LLT only reports failure on a non-positive pivot; a pivot that is
// numerically zero relative to the diagonal is treated as a failure too.
bool try_factor(const MatrixXd& a, MatrixXd& lower) {
  Eigen::LLT<MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return false;
  lower = llt.matrixL();
  const double scale = a.diagonal().cwiseAbs().maxCoeff();
  const double floor = static_cast<double>(a.rows()) * std::numeric_limits<double>::epsilon() * scale;
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    const double pivot = lower(i, i) * lower(i, i);
    if (!(pivot > floor) || !std::isfinite(pivot)) return false;
  }
  return true;
}

}  // namespace

SpdMatrix::SpdMatrix(MatrixXd m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("SpdMatrix: matrix is not square");
  if (m.rows() == 0) throw DimensionMismatch("SpdMatrix: empty matrix");
  if (!m.allFinite()) throw DomainError("SpdMatrix: non-finite entry");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) throw DomainError("SpdMatrix: matrix is not symmetric");
  m_ = 0.5 * (m + m.transpose());
}

SpdMatrix SpdMatrix::symmetrized(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("SpdMatrix: matrix is not square");
  return SpdMatrix(MatrixXd(0.5 * (m + m.transpose())), Unchecked{});
}

SpdMatrix SpdMatrix::identity(Eigen::Index n) {
  return SpdMatrix(MatrixXd::Identity(n, n), Unchecked{});
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngHandle::RngHandle(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

RngHandle RngHandle::derive(std::uint64_t stream) const {
  return RngHandle(mix_seed(seed_ ^ mix_seed(stream + 0x632be59bd9b4e019ULL)));
}

double RngHandle::uniform() {
  // 53 random bits mapped to the open interval (0, 1).
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngHandle::normal() { return normal_(engine_); }

double RngHandle::gamma(double shape, double scale) {
  std::gamma_distribution<double> dist(shape, scale);
  return dist(engine_);
}

double RngHandle::chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

VectorXd RngHandle::normal_vector(Eigen::Index n) {
  VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal();
  return z;
}

MatrixXd RngHandle::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  MatrixXd z(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) z(i, j) = normal();
  return z;
}

CholFactor cholesky(const SpdMatrix& m) {
  const MatrixXd& a = m.matrix();
  CholFactor f;
  if (try_factor(a, f.lower)) return f;

  const double mean_diag = a.diagonal().mean();
  for (double eps : kJitterLadder) {
    const double jitter = eps * std::abs(mean_diag);
    MatrixXd jittered = a;
    jittered.diagonal().array() += jitter;
    if (try_factor(jittered, f.lower)) {
      f.jitter_applied = jitter;
      return f;
    }
  }
  throw NotPositiveDefinite("cholesky: matrix of dimension " + std::to_string(a.rows()) +
                            " is not positive definite after maximum jitter");
}

VectorXd lower_solve(const CholFactor& f, const VectorXd& b) {
  if (b.size() != f.dim()) throw DimensionMismatch("lower_solve: dimension mismatch");
  return f.lower.triangularView<Eigen::Lower>().solve(b);
}

MatrixXd lower_solve(const CholFactor& f, const MatrixXd& b) {
  if (b.rows() != f.dim()) throw DimensionMismatch("lower_solve: dimension mismatch");
  return f.lower.triangularView<Eigen::Lower>().solve(b);
}

VectorXd chol_solve(const CholFactor& f, const VectorXd& b) {
  VectorXd half = lower_solve(f, b);
  return f.lower.transpose().triangularView<Eigen::Upper>().solve(half);
}

MatrixXd chol_solve(const CholFactor& f, const MatrixXd& b) {
  MatrixXd half = lower_solve(f, b);
  return f.lower.transpose().triangularView<Eigen::Upper>().solve(half);
}

MatrixXd chol_inverse(const CholFactor& f) {
  MatrixXd inv = chol_solve(f, MatrixXd(MatrixXd::Identity(f.dim(), f.dim())));
  return 0.5 * (inv + inv.transpose());
}

double logdet(const CholFactor& f) {
  return 2.0 * f.lower.diagonal().array().log().sum();
}

SymEigen sym_eigen(const SpdMatrix& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(m.matrix());
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("sym_eigen: eigen solver did not converge");

  const Eigen::Index n = m.dim();
  MatrixXd vectors = solver.eigenvectors();
  const VectorXd values = solver.eigenvalues();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(vectors(i, j)) > 1e-12) {
        if (vectors(i, j) < 0.0) vectors.col(j) *= -1.0;
        break;
      }
    }
  }

  const double scale = std::max(values.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (std::abs(values(a) - values(b)) > 1e-12 * scale) return values(a) > values(b);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (vectors(i, a) != vectors(i, b)) return vectors(i, a) < vectors(i, b);
    }
    return false;
  });

  SymEigen out{VectorXd(n), MatrixXd(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = values(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

MatrixXd haar_orthogonal(Eigen::Index n, RngHandle& rng) {
  if (n < 1) throw DomainError("haar_orthogonal: n must be positive");
  const MatrixXd z = rng.normal_matrix(n, n);
  Eigen::HouseholderQR<MatrixXd> qr(z);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, n);
  const MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

}  // namespace tprocess
