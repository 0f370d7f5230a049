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

#include "tprocess/tp_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tprocess/quasi_newton.hpp"
#include "tprocess/slice_sampler.hpp"

namespace tprocess {

namespace {

constexpr double kLogBound = 20.0;

struct Factored {
  CholFactor factor;
  VectorXd residual;
  VectorXd alpha;
  double beta = 0.0;
};

Factored factor_training(const Dataset& data, const HyperParams& hp, const KernelSpec& spec) {
  data.validate();
  if (data.dim() != spec.input_dim) throw DimensionMismatch("dataset dimension differs from kernel input dimension");
  Factored f;
  f.factor = cholesky(gram(spec, hp.kernel, data.x));
  f.residual = data.y.array() - hp.mean_mu;
  const VectorXd half = lower_solve(f.factor, f.residual);
  f.beta = half.squaredNorm();
  f.alpha = f.factor.lower.transpose().triangularView<Eigen::Upper>().solve(half);
  return f;
}

// 0.5 * sum_ij w_ij * dk_ij for each kernel gradient matrix.
void kernel_block_gradient(const MatrixXd& w, const std::vector<MatrixXd>& dk, VectorXd& grad) {
  for (std::size_t k = 0; k < dk.size(); ++k) grad(static_cast<Eigen::Index>(k)) = 0.5 * w.cwiseProduct(dk[k]).sum();
}

double tp_value_and_grad(const Dataset& data, const HyperParams& hp, const KernelSpec& spec, VectorXd* grad) {
  const Factored f = factor_training(data, hp, spec);
  const double nu = hp.nu();
  const double value = mvt_log_pdf_factored(nu, f.factor, f.residual);
  if (grad == nullptr) return value;

  const double n = static_cast<double>(data.size());
  const double c = (nu + n) / (nu + f.beta - 2.0);
  const Eigen::Index nk = spec.num_params();
  grad->resize(nk + 2);
  const MatrixXd w = c * f.alpha * f.alpha.transpose() - chol_inverse(f.factor);
  VectorXd kgrad(nk);
  kernel_block_gradient(w, gram_grad(spec, hp.kernel, data.x), kgrad);
  grad->head(nk) = kgrad;

  const double dnu = -n / (2.0 * (nu - 2.0)) + 0.5 * digamma_difference(0.5 * nu, 0.5 * n) -
                     0.5 * std::log1p(f.beta / (nu - 2.0)) +
                     (nu + n) * f.beta / (2.0 * (nu - 2.0) * (nu - 2.0) + 2.0 * f.beta * (nu - 2.0));
  (*grad)(nk) = dnu * (nu - 2.0);
  (*grad)(nk + 1) = c * f.alpha.sum();
  return value;
}

double gp_value_and_grad(const Dataset& data, const HyperParams& hp, const KernelSpec& spec, VectorXd* grad) {
  const Factored f = factor_training(data, hp, spec);
  const double n = static_cast<double>(data.size());
  const double value = -0.5 * f.beta - 0.5 * logdet(f.factor) - 0.5 * n * std::log(2.0 * std::numbers::pi);
  if (grad == nullptr) return value;

  const Eigen::Index nk = spec.num_params();
  grad->resize(nk + 1);
  const MatrixXd w = f.alpha * f.alpha.transpose() - chol_inverse(f.factor);
  VectorXd kgrad(nk);
  kernel_block_gradient(w, gram_grad(spec, hp.kernel, data.x), kgrad);
  grad->head(nk) = kgrad;
  (*grad)(nk) = f.alpha.sum();
  return value;
}

double normal_log_density(double x, const NormalPrior& p) {
  const double z = (x - p.mean) / p.sd;
  return -0.5 * z * z - std::log(p.sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace

std::string to_string(ModelKind kind) { return kind == ModelKind::tp ? "tp" : "gp"; }

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "tp") return ModelKind::tp;
  if (name == "gp") return ModelKind::gp;
  throw DomainError("unknown model '" + name + "'");
}

double HyperParams::nu() const { return 2.0 + std::exp(nu_tilde); }

double HyperParams::nu_tilde_for(double nu) {
  if (!(nu > 2.0)) throw DomainError("degrees of freedom must exceed 2");
  return std::log(nu - 2.0);
}

HyperParams HyperParams::make(KernelParams kernel, double nu, double mean_mu) {
  HyperParams hp;
  hp.kernel = std::move(kernel);
  hp.nu_tilde = nu_tilde_for(nu);
  hp.mean_mu = mean_mu;
  return hp;
}

void Dataset::validate() const {
  if (x.rows() < 1) throw DataError("dataset has no rows");
  if (y.size() != x.rows()) throw DimensionMismatch("dataset: inputs and targets differ in length");
  if (!x.allFinite() || !y.allFinite()) throw DataError("dataset contains non-finite values");
}

Eigen::Index num_hyperparams(const KernelSpec& spec, ModelKind kind) {
  return spec.num_params() + (kind == ModelKind::tp ? 2 : 1);
}

VectorXd pack(const HyperParams& hp, const KernelSpec& spec, ModelKind kind) {
  VectorXd v(num_hyperparams(spec, kind));
  const Eigen::Index nk = spec.num_params();
  v.head(nk) = hp.kernel.unconstrained(spec);
  if (kind == ModelKind::tp) v(nk) = hp.nu_tilde;
  v(v.size() - 1) = hp.mean_mu;
  return v;
}

HyperParams unpack(const VectorXd& v, const KernelSpec& spec, ModelKind kind, const HyperParams& base) {
  if (v.size() != num_hyperparams(spec, kind)) throw DimensionMismatch("unpack: wrong parameter count");
  const Eigen::Index nk = spec.num_params();
  HyperParams hp = base;
  hp.kernel = KernelParams::from_unconstrained(spec, v.head(nk));
  if (kind == ModelKind::tp) hp.nu_tilde = v(nk);
  hp.mean_mu = v(v.size() - 1);
  return hp;
}

double tp_log_marginal(const Dataset& data, const HyperParams& hp, const KernelSpec& spec) {
  return tp_value_and_grad(data, hp, spec, nullptr);
}

VectorXd tp_log_marginal_grad(const Dataset& data, const HyperParams& hp, const KernelSpec& spec) {
  VectorXd g;
  tp_value_and_grad(data, hp, spec, &g);
  return g;
}

double gp_log_marginal(const Dataset& data, const HyperParams& hp, const KernelSpec& spec) {
  return gp_value_and_grad(data, hp, spec, nullptr);
}

VectorXd gp_log_marginal_grad(const Dataset& data, const HyperParams& hp, const KernelSpec& spec) {
  VectorXd g;
  gp_value_and_grad(data, hp, spec, &g);
  return g;
}

double log_marginal(const Dataset& data, const HyperParams& hp, const KernelSpec& spec, ModelKind kind) {
  return kind == ModelKind::tp ? tp_log_marginal(data, hp, spec) : gp_log_marginal(data, hp, spec);
}

double log_marginal_and_grad(const Dataset& data, const HyperParams& hp, const KernelSpec& spec, ModelKind kind,
                             VectorXd& grad) {
  return kind == ModelKind::tp ? tp_value_and_grad(data, hp, spec, &grad) : gp_value_and_grad(data, hp, spec, &grad);
}

ProcessPosterior::ProcessPosterior(const Dataset& data, const HyperParams& hp, const KernelSpec& spec)
    : x_(data.x), hp_(hp), spec_(spec) {
  Factored f = factor_training(data, hp, spec);
  factor_ = std::move(f.factor);
  alpha_ = std::move(f.alpha);
  beta_ = f.beta;
}

double ProcessPosterior::tp_scale_factor() const {
  const double nu = hp_.nu();
  return (nu + beta_ - 2.0) / (nu + static_cast<double>(x_.rows()) - 2.0);
}

MatrixXd ProcessPosterior::test_block(const MatrixXd& xstar, bool include_observation_noise) const {
  MatrixXd k = cross_gram(spec_, hp_.kernel, xstar, xstar);
  if (include_observation_noise && spec_.include_noise) k.diagonal().array() += hp_.kernel.noise();
  return k;
}

PredictiveDist ProcessPosterior::predict_tp(const MatrixXd& xstar, bool include_observation_noise) const {
  const MatrixXd cross = cross_gram(spec_, hp_.kernel, xstar, x_);
  const MatrixXd v = lower_solve(factor_, MatrixXd(cross.transpose()));
  PredictiveDist out;
  out.dof = hp_.nu() + static_cast<double>(x_.rows());
  out.mean = (cross * alpha_).array() + hp_.mean_mu;
  out.beta1 = beta_;
  out.scale_factor = tp_scale_factor();
  out.scale = SpdMatrix::symmetrized(out.scale_factor * (test_block(xstar, include_observation_noise) - v.transpose() * v));
  return out;
}

GaussianPredictive ProcessPosterior::predict_gp(const MatrixXd& xstar, bool include_observation_noise) const {
  const MatrixXd cross = cross_gram(spec_, hp_.kernel, xstar, x_);
  const MatrixXd v = lower_solve(factor_, MatrixXd(cross.transpose()));
  GaussianPredictive out;
  out.mean = (cross * alpha_).array() + hp_.mean_mu;
  out.cov = SpdMatrix::symmetrized(test_block(xstar, include_observation_noise) - v.transpose() * v);
  return out;
}

ProcessPosterior::Point ProcessPosterior::point_gp(const VectorXd& x, bool include_observation_noise) const {
  const MatrixXd xs = x.transpose();
  const VectorXd cross = cross_gram(spec_, hp_.kernel, x_, xs).col(0);
  const VectorXd v = lower_solve(factor_, cross);
  Point p;
  p.mean = hp_.mean_mu + cross.dot(alpha_);
  double prior = hp_.kernel.amplitude();
  if (include_observation_noise && spec_.include_noise) prior += hp_.kernel.noise();
  p.variance = std::max(prior - v.squaredNorm(), 0.0);
  p.dof = std::numeric_limits<double>::infinity();
  return p;
}

ProcessPosterior::Point ProcessPosterior::point_tp(const VectorXd& x, bool include_observation_noise) const {
  Point p = point_gp(x, include_observation_noise);
  p.variance *= tp_scale_factor();
  p.dof = hp_.nu() + static_cast<double>(x_.rows());
  return p;
}

PredictiveDist tp_predict(const Dataset& data, const HyperParams& hp, const KernelSpec& spec, const MatrixXd& xstar,
                          bool include_observation_noise) {
  return ProcessPosterior(data, hp, spec).predict_tp(xstar, include_observation_noise);
}

GaussianPredictive gp_predict(const Dataset& data, const HyperParams& hp, const KernelSpec& spec,
                              const MatrixXd& xstar, bool include_observation_noise) {
  return ProcessPosterior(data, hp, spec).predict_gp(xstar, include_observation_noise);
}

std::vector<NormalPrior> PriorSet::expand(const KernelSpec& spec, ModelKind kind) const {
  std::vector<NormalPrior> out;
  out.push_back(log_amplitude);
  for (Eigen::Index d = 0; d < spec.input_dim; ++d) out.push_back(log_lengthscale);
  if (spec.include_noise) out.push_back(log_noise);
  if (kind == ModelKind::tp) out.push_back(nu_tilde);
  out.push_back(mean);
  return out;
}

double log_prior(const VectorXd& packed, const KernelSpec& spec, ModelKind kind, const PriorSet& priors,
                 VectorXd* grad) {
  const std::vector<NormalPrior> p = priors.expand(spec, kind);
  if (static_cast<Eigen::Index>(p.size()) != packed.size()) throw DimensionMismatch("log_prior: wrong parameter count");
  if (grad != nullptr) grad->resize(packed.size());
  double s = 0.0;
  for (Eigen::Index i = 0; i < packed.size(); ++i) {
    const NormalPrior& q = p[static_cast<std::size_t>(i)];
    s += normal_log_density(packed(i), q);
    if (grad != nullptr) (*grad)(i) = -(packed(i) - q.mean) / (q.sd * q.sd);
  }
  return s;
}

FitResult fit_map(const Dataset& data, const KernelSpec& spec, ModelKind kind, const HyperParams& init,
                  const OptimizerConfig& config, const PriorSet& priors, RngHandle& rng) {
  const Eigen::Index dim = num_hyperparams(spec, kind);
  QuasiNewtonOptions options;
  options.max_iterations = config.max_iterations;
  options.gradient_tolerance = config.gradient_tolerance;
  options.lower = VectorXd::Constant(dim, -kLogBound);
  options.upper = VectorXd::Constant(dim, kLogBound);
  options.lower(dim - 1) = -std::numeric_limits<double>::infinity();
  options.upper(dim - 1) = std::numeric_limits<double>::infinity();

  const ObjectiveWithGradient objective = [&](const VectorXd& v, VectorXd& grad) {
    const HyperParams hp = unpack(v, spec, kind, init);
    double value = log_marginal_and_grad(data, hp, spec, kind, grad);
    if (config.use_priors) {
      VectorXd pg;
      value += log_prior(v, spec, kind, priors, &pg);
      grad += pg;
    }
    return value;
  };

  FitResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  try {
    best.initial_log_marginal = log_marginal(data, init, spec, kind);
  } catch (const NumericError&) {
    best.initial_log_marginal = -std::numeric_limits<double>::infinity();
  }

  const VectorXd start = pack(init, spec, kind);
  const int restarts = std::max(config.restarts, 1);
  bool any = false;
  for (int r = 0; r < restarts; ++r) {
    VectorXd x0 = start;
    if (r > 0) x0 += config.restart_scale * rng.normal_vector(dim);
    try {
      const QuasiNewtonResult res = maximize_bfgs(objective, x0, options);
      if (!any || res.value > best.objective) {
        any = true;
        best.objective = res.value;
        best.hp = unpack(res.x, spec, kind, init);
        best.gradient_norm = res.projected_gradient_norm;
        best.best_restart = r;
        best.trace = res.trace;
      }
    } catch (const NumericError&) {
      ++best.restarts_failed;
    }
  }
  if (!any) throw AllRestartsFailed("fit_map: every restart failed");
  best.log_marginal = log_marginal(data, best.hp, spec, kind);
  return best;
}

PosteriorSampleSet slice_sample_posterior(const Dataset& data, const KernelSpec& spec, ModelKind kind,
                                          const PriorSet& priors, const SamplerConfig& config, RngHandle& rng,
                                          const std::optional<HyperParams>& init) {
  if (config.samples < 1) throw DomainError("slice_sample_posterior: need at least one sample");
  if (config.burn_in < 0 || config.thin < 1) throw DomainError("slice_sample_posterior: invalid burn-in or thinning");
  HyperParams base;
  VectorXd state;
  if (init) {
    base = *init;
    state = pack(base, spec, kind);
  } else {
    const std::vector<NormalPrior> p = priors.expand(spec, kind);
    state.resize(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) state(static_cast<Eigen::Index>(i)) = p[i].mean;
    base = unpack(state, spec, kind, HyperParams{});
  }

  const LogDensity density = [&](const VectorXd& v) {
    double lp = log_prior(v, spec, kind, priors);
    if (!config.likelihood_enabled || std::isnan(lp)) return lp;
    try {
      return lp + log_marginal(data, unpack(v, spec, kind, base), spec, kind);
    } catch (const NotPositiveDefinite&) {
      return -std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  SliceOptions options;
  options.width = config.initial_width;
  options.max_step_out = config.max_step_out;
  SliceStats stats;
  double log_p = density(state);
  if (std::isnan(log_p)) throw NonFiniteDensity("slice_sample_posterior: NaN density at initial state");

  PosteriorSampleSet out;
  for (int i = 0; i < config.burn_in; ++i) slice_sweep(density, state, log_p, options, rng, stats);
  out.samples.reserve(static_cast<std::size_t>(config.samples));
  for (int h = 0; h < config.samples; ++h) {
    for (int t = 0; t < config.thin; ++t) slice_sweep(density, state, log_p, options, rng, stats);
    out.samples.push_back(unpack(state, spec, kind, base));
  }
  out.final_state = state;
  out.density_evaluations = stats.evaluations;
  if (stats.updates > 0) {
    out.mean_step_outs = static_cast<double>(stats.step_outs) / static_cast<double>(stats.updates);
    out.mean_shrinks = static_cast<double>(stats.shrinks) / static_cast<double>(stats.updates);
  }
  return out;
}

namespace {

void check_test_size(Eigen::Index m, const VectorXd& ytest) {
  if (m != ytest.size()) throw DimensionMismatch("evaluate_metrics: predictive and targets differ in length");
  if (m == 0) throw DimensionMismatch("evaluate_metrics: no test targets");
}

double tp_point_log_density(double dof, double mean, double scale, double y) {
  const double sd = std::sqrt(scale);
  return student1_log_pdf(dof, (y - mean) / sd) - std::log(sd);
}

double gaussian_point_log_density(double mean, double var, double y) {
  const double z = y - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * z * z / var;
}

Metrics finish(const VectorXd& mean, const VectorXd& log_density, const VectorXd& ytest) {
  Metrics m;
  m.mse = (mean - ytest).squaredNorm() / static_cast<double>(ytest.size());
  m.log_likelihood_sum = log_density.sum();
  m.mean_log_likelihood = m.log_likelihood_sum / static_cast<double>(ytest.size());
  return m;
}

double log_mean_exp(const std::vector<double>& v) {
  const double top = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (double x : v) s += std::exp(x - top);
  return top + std::log(s / static_cast<double>(v.size()));
}

}  // namespace

Metrics evaluate_metrics(const PredictiveDist& pred, const VectorXd& ytest) {
  check_test_size(pred.mean.size(), ytest);
  VectorXd ld(ytest.size());
  for (Eigen::Index i = 0; i < ytest.size(); ++i) ld(i) = tp_point_log_density(pred.dof, pred.mean(i), pred.scale(i, i), ytest(i));
  return finish(pred.mean, ld, ytest);
}

Metrics evaluate_metrics(const GaussianPredictive& pred, const VectorXd& ytest) {
  check_test_size(pred.mean.size(), ytest);
  VectorXd ld(ytest.size());
  for (Eigen::Index i = 0; i < ytest.size(); ++i) ld(i) = gaussian_point_log_density(pred.mean(i), pred.cov(i, i), ytest(i));
  return finish(pred.mean, ld, ytest);
}

Metrics evaluate_metrics(const std::vector<PredictiveDist>& preds, const VectorXd& ytest) {
  if (preds.empty()) throw DimensionMismatch("evaluate_metrics: empty mixture");
  VectorXd mean = VectorXd::Zero(ytest.size());
  VectorXd ld(ytest.size());
  for (const auto& p : preds) {
    check_test_size(p.mean.size(), ytest);
    mean += p.mean;
  }
  mean /= static_cast<double>(preds.size());
  for (Eigen::Index i = 0; i < ytest.size(); ++i) {
    std::vector<double> terms;
    for (const auto& p : preds) terms.push_back(tp_point_log_density(p.dof, p.mean(i), p.scale(i, i), ytest(i)));
    ld(i) = log_mean_exp(terms);
  }
  return finish(mean, ld, ytest);
}

Metrics evaluate_metrics(const std::vector<GaussianPredictive>& preds, const VectorXd& ytest) {
  if (preds.empty()) throw DimensionMismatch("evaluate_metrics: empty mixture");
  VectorXd mean = VectorXd::Zero(ytest.size());
  VectorXd ld(ytest.size());
  for (const auto& p : preds) {
    check_test_size(p.mean.size(), ytest);
    mean += p.mean;
  }
  mean /= static_cast<double>(preds.size());
  for (Eigen::Index i = 0; i < ytest.size(); ++i) {
    std::vector<double> terms;
    for (const auto& p : preds) terms.push_back(gaussian_point_log_density(p.mean(i), p.cov(i, i), ytest(i)));
    ld(i) = log_mean_exp(terms);
  }
  return finish(mean, ld, ytest);
}

double joint_log_likelihood(const PredictiveDist& pred, const VectorXd& ytest) {
  return mvt_log_pdf(MvtParams{pred.dof, pred.mean, pred.scale}, ytest);
}

double joint_log_likelihood(const GaussianPredictive& pred, const VectorXd& ytest) {
  return gaussian_log_pdf(pred.mean, pred.cov, ytest);
}

std::pair<Dataset, Dataset> synthetic_regression(const SyntheticConfig& config, RngHandle& rng) {
  if (config.n_train < 1 || config.n_test < 1) throw DomainError("synthetic_regression: need train and test points");
  if (!(config.x_high > config.x_low)) throw DomainError("synthetic_regression: empty input range");
  const Eigen::Index n = config.n_train + config.n_test;
  const Eigen::Index dim = config.input_dim;
  MatrixXd x(n, dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < dim; ++d) x(i, d) = config.x_low + (config.x_high - config.x_low) * rng.uniform();

  const KernelSpec spec{KernelFamily::squared_exponential_ard, dim, false};
  const KernelParams params =
      KernelParams::from_values(config.amplitude, VectorXd::Constant(dim, config.lengthscale), 0.0);
  const CholFactor f = cholesky(gram(spec, params, x));
  const VectorXd latent = f.lower * rng.normal_vector(n);

  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double eps = 0.0;
    if (config.noise == SyntheticConfig::Noise::gaussian) {
      eps = config.noise_scale * rng.normal();
    } else {
      const double z = rng.normal();
      eps = config.noise_scale * z / std::sqrt(rng.chi_squared(config.noise_dof) / config.noise_dof);
    }
    y(i) = latent(i) + eps;
  }

  Dataset train{x.topRows(config.n_train), y.head(config.n_train)};
  Dataset test{x.bottomRows(config.n_test), y.tail(config.n_test)};
  return {std::move(train), std::move(test)};
}

}  // namespace tprocess
