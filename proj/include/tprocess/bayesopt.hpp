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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tprocess/tp_model.hpp"

namespace tprocess {

/// Expected improvement below f_best under a unit-variance-parameterized
/// Student-t predictive with covariance `scale` and `dof` degrees of freedom.
double ei_tp(double f_best, double mean, double scale, double dof);
/// Univariate PredictiveDist overload.
double ei_tp(double f_best, const PredictiveDist& pred);
/// Gaussian expected improvement with predictive variance `variance`.
double ei_gaussian(double f_best, double mean, double variance);

/// Posterior-averaged expected improvement over a fixed set of hyperparameter
/// samples. Factorizations are built once at construction.
class Acquisition {
 public:
  Acquisition(const Dataset& data, const std::vector<HyperParams>& samples, const KernelSpec& spec, ModelKind kind);

  double operator()(const VectorXd& x) const;
  double f_best() const { return f_best_; }
  std::size_t size() const { return posteriors_.size(); }

 private:
  std::vector<ProcessPosterior> posteriors_;
  ModelKind kind_;
  double f_best_;
};

double marginalized_ei(const VectorXd& x, const Dataset& data, const PosteriorSampleSet& samples,
                       const KernelSpec& spec, ModelKind kind = ModelKind::tp);

struct SearchConfig {
  int candidates_per_dim = 1000;
  int refine_top = 10;
  int refine_steps = 100;
};

struct Proposal {
  VectorXd x;
  double acquisition = 0.0;
  /// Best acquisition over the raw candidate set.
  double candidate_best = 0.0;
};

/// Halton points in [0,1)^dim with a random toroidal shift.
MatrixXd shifted_halton(Eigen::Index count, Eigen::Index dim, RngHandle& rng);

Proposal propose_next(const std::function<double(const VectorXd&)>& acquisition, const VectorXd& lower,
                      const VectorXd& upper, const SearchConfig& search, RngHandle& rng);
Proposal propose_next(const Dataset& data, const PosteriorSampleSet& samples, const KernelSpec& spec,
                      ModelKind kind, const VectorXd& lower, const VectorXd& upper, const SearchConfig& search,
                      RngHandle& rng);

struct BoProblem {
  std::function<double(const VectorXd&)> objective;
  VectorXd lower;
  VectorXd upper;
  MatrixXd initial_design;

  void validate() const;
};

struct BoRecord {
  VectorXd x;
  double f = 0.0;
  double best = 0.0;
  /// NaN for initial-design rows.
  double acquisition = 0.0;
  double elapsed_seconds = 0.0;
};

struct BoTrace {
  ModelKind surrogate = ModelKind::tp;
  std::uint64_t seed = 0;
  std::vector<BoRecord> initial;
  std::vector<BoRecord> iterations;
  /// Set when the objective threw; the trace is partial.
  std::optional<std::string> aborted;

  double best() const;
  /// 1-based iteration (excluding the initial design) at which the running
  /// best first satisfies |best - target| <= rel_tol * |target|; nullopt if never.
  std::optional<int> iterations_to(double target, double rel_tol) const;
};

struct BoConfig {
  SamplerConfig sampler{10, 50, 1, 1.0, 10, true};
  SearchConfig search;
  PriorSet priors;
  /// Start each iteration's chain from the previous iteration's final state.
  bool warm_start = true;
  /// Fit the surrogate to targets rescaled to zero mean and unit variance,
  /// recomputed every iteration. Off by default.
  bool standardize = false;
};

BoTrace bo_run(const BoProblem& problem, ModelKind surrogate, int budget, const BoConfig& config, std::uint64_t seed);

}  // namespace tprocess
