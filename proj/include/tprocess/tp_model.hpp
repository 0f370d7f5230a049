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

#include <optional>
#include <vector>

#include "tprocess/distributions.hpp"
#include "tprocess/kernels.hpp"

namespace tprocess {

enum class ModelKind { tp, gp };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Kernel parameters, degrees of freedom and constant mean. nu = 2 + exp(nu_tilde).
struct HyperParams {
  KernelParams kernel;
  double nu_tilde = 0.0;
  double mean_mu = 0.0;

  double nu() const;
  static double nu_tilde_for(double nu);
  static HyperParams make(KernelParams kernel, double nu, double mean_mu);
};

struct Dataset {
  MatrixXd x;
  VectorXd y;

  Eigen::Index size() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }
  void validate() const;
};

/// Posterior predictive of a Student-t process at M test inputs.
struct PredictiveDist {
  double dof = 0.0;
  VectorXd mean;
  /// Includes the (nu + beta1 - 2) / (nu + n1 - 2) factor.
  SpdMatrix scale;
  double beta1 = 0.0;
  double scale_factor = 1.0;
};

struct GaussianPredictive {
  VectorXd mean;
  SpdMatrix cov;
};

/// Number of unconstrained parameters: kernel block, nu_tilde (TP only), mean.
Eigen::Index num_hyperparams(const KernelSpec& spec, ModelKind kind);
VectorXd pack(const HyperParams& hp, const KernelSpec& spec, ModelKind kind);
/// For the GP, nu_tilde is taken from `base`.
HyperParams unpack(const VectorXd& v, const KernelSpec& spec, ModelKind kind, const HyperParams& base = {});

double tp_log_marginal(const Dataset& data, const HyperParams& hp, const KernelSpec& spec);
/// Gradient over pack(hp, spec, ModelKind::tp).
VectorXd tp_log_marginal_grad(const Dataset& data, const HyperParams& hp, const KernelSpec& spec);

double gp_log_marginal(const Dataset& data, const HyperParams& hp, const KernelSpec& spec);
VectorXd gp_log_marginal_grad(const Dataset& data, const HyperParams& hp, const KernelSpec& spec);

double log_marginal(const Dataset& data, const HyperParams& hp, const KernelSpec& spec, ModelKind kind);
/// Value and gradient sharing one factorization.
double log_marginal_and_grad(const Dataset& data, const HyperParams& hp, const KernelSpec& spec, ModelKind kind,
                             VectorXd& grad);

/// Factorized training state for repeated prediction under fixed hyperparameters.
class ProcessPosterior {
 public:
  ProcessPosterior(const Dataset& data, const HyperParams& hp, const KernelSpec& spec);

  struct Point {
    double mean = 0.0;
    /// Predictive variance: for the TP this is the scale (covariance) of the
    /// univariate MVT with `dof` degrees of freedom.
    double variance = 0.0;
    double dof = 0.0;
  };

  PredictiveDist predict_tp(const MatrixXd& xstar, bool include_observation_noise) const;
  GaussianPredictive predict_gp(const MatrixXd& xstar, bool include_observation_noise) const;
  Point point_tp(const VectorXd& x, bool include_observation_noise = false) const;
  Point point_gp(const VectorXd& x, bool include_observation_noise = false) const;

  double beta1() const { return beta_; }
  double tp_scale_factor() const;
  const CholFactor& factor() const { return factor_; }
  const HyperParams& hyperparams() const { return hp_; }

 private:
  MatrixXd test_block(const MatrixXd& xstar, bool include_observation_noise) const;

  MatrixXd x_;
  HyperParams hp_;
  KernelSpec spec_;
  CholFactor factor_;
  VectorXd alpha_;
  double beta_ = 0.0;
};

PredictiveDist tp_predict(const Dataset& data, const HyperParams& hp, const KernelSpec& spec, const MatrixXd& xstar,
                          bool include_observation_noise);
GaussianPredictive gp_predict(const Dataset& data, const HyperParams& hp, const KernelSpec& spec,
                              const MatrixXd& xstar, bool include_observation_noise);

/// Independent normal priors on each unconstrained coordinate.
struct NormalPrior {
  double mean = 0.0;
  double sd = 1.0;
};

struct PriorSet {
  NormalPrior log_amplitude{0.0, 1.0};
  NormalPrior log_lengthscale{0.0, 1.0};
  NormalPrior log_noise{0.0, 1.0};
  NormalPrior nu_tilde{0.0, 1.0};
  NormalPrior mean{0.0, 10.0};

  /// Per-coordinate priors in pack() order.
  std::vector<NormalPrior> expand(const KernelSpec& spec, ModelKind kind) const;
};

double log_prior(const VectorXd& packed, const KernelSpec& spec, ModelKind kind, const PriorSet& priors,
                 VectorXd* grad = nullptr);

struct OptimizerConfig {
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;
  int restarts = 5;
  /// Standard deviation of the perturbation applied to restarts after the first.
  double restart_scale = 0.5;
  bool use_priors = false;
};

struct FitResult {
  HyperParams hp;
  /// Objective value at hp (log marginal, plus log prior if use_priors).
  double objective = 0.0;
  double log_marginal = 0.0;
  double initial_log_marginal = 0.0;
  double gradient_norm = 0.0;
  int restarts_failed = 0;
  int best_restart = 0;
  /// Objective per iteration of the winning restart.
  std::vector<double> trace;
};

FitResult fit_map(const Dataset& data, const KernelSpec& spec, ModelKind kind, const HyperParams& init,
                  const OptimizerConfig& config, const PriorSet& priors, RngHandle& rng);

struct SamplerConfig {
  int samples = 10;
  int burn_in = 50;
  int thin = 1;
  double initial_width = 1.0;
  int max_step_out = 10;
  /// Off samples the prior alone.
  bool likelihood_enabled = true;
};

struct PosteriorSampleSet {
  std::vector<HyperParams> samples;
  /// Chain state after the last sweep, in pack() order.
  VectorXd final_state;
  long density_evaluations = 0;
  double mean_step_outs = 0.0;
  double mean_shrinks = 0.0;
};

PosteriorSampleSet slice_sample_posterior(const Dataset& data, const KernelSpec& spec, ModelKind kind,
                                          const PriorSet& priors, const SamplerConfig& config, RngHandle& rng,
                                          const std::optional<HyperParams>& init = std::nullopt);

struct Metrics {
  double mse = 0.0;
  double mean_log_likelihood = 0.0;
  double log_likelihood_sum = 0.0;
};

/// Per-point marginal predictives.
Metrics evaluate_metrics(const PredictiveDist& pred, const VectorXd& ytest);
Metrics evaluate_metrics(const GaussianPredictive& pred, const VectorXd& ytest);
/// Equal-weight mixtures over posterior samples.
Metrics evaluate_metrics(const std::vector<PredictiveDist>& preds, const VectorXd& ytest);
Metrics evaluate_metrics(const std::vector<GaussianPredictive>& preds, const VectorXd& ytest);

/// Joint log density of all test targets.
double joint_log_likelihood(const PredictiveDist& pred, const VectorXd& ytest);
double joint_log_likelihood(const GaussianPredictive& pred, const VectorXd& ytest);

struct SyntheticConfig {
  enum class Noise { gaussian, student_t };
  Eigen::Index n_train = 80;
  Eigen::Index n_test = 20;
  Eigen::Index input_dim = 1;
  double x_low = 0.0;
  double x_high = 10.0;
  double amplitude = 1.0;
  double lengthscale = 1.0;
  Noise noise = Noise::gaussian;
  /// Gaussian: standard deviation. Student-t: scale of the classical t.
  double noise_scale = 0.1;
  double noise_dof = 3.0;
};

/// Function drawn from a squared-exponential GP plus independent noise; the
/// first n_train points are the training set.
std::pair<Dataset, Dataset> synthetic_regression(const SyntheticConfig& config, RngHandle& rng);

}  // namespace tprocess
