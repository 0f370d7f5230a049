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

#include "tprocess/bayesopt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "tprocess/error.hpp"

namespace tprocess {

double ei_tp(double f_best, double mean, double scale, double dof) {
  if (!(dof > 2.0)) throw DomainError("ei_tp: degrees of freedom must exceed 2");
  if (!(scale >= 0.0)) throw DomainError("ei_tp: negative predictive scale");
  const double tau = std::sqrt(scale);
  if (tau == 0.0 || !std::isfinite((f_best - mean) / tau)) return std::max(f_best - mean, 0.0);
  const double gamma = (f_best - mean) / tau;
  const double value = gamma * tau * student1_cdf(dof, gamma) +
                       tau * (1.0 + (gamma * gamma - 1.0) / (dof - 1.0)) * student1_pdf(dof, gamma);
  return std::max(value, 0.0);
}

double ei_tp(double f_best, const PredictiveDist& pred) {
  if (pred.mean.size() != 1) throw DimensionMismatch("ei_tp: predictive must be univariate");
  return ei_tp(f_best, pred.mean(0), pred.scale(0, 0), pred.dof);
}

double ei_gaussian(double f_best, double mean, double variance) {
  if (!(variance >= 0.0)) throw DomainError("ei_gaussian: negative predictive variance");
  const double sigma = std::sqrt(variance);
  if (sigma == 0.0 || !std::isfinite((f_best - mean) / sigma)) return std::max(f_best - mean, 0.0);
  const double gamma = (f_best - mean) / sigma;
  const double pdf = std::exp(-0.5 * gamma * gamma) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-gamma / std::numbers::sqrt2);
  return std::max(sigma * (gamma * cdf + pdf), 0.0);
}

Acquisition::Acquisition(const Dataset& data, const std::vector<HyperParams>& samples, const KernelSpec& spec,
                         ModelKind kind)
    : kind_(kind), f_best_(data.y.minCoeff()) {
  if (samples.empty()) throw DomainError("acquisition: need at least one hyperparameter sample");
  posteriors_.reserve(samples.size());
  for (const auto& hp : samples) posteriors_.emplace_back(data, hp, spec);
}

double Acquisition::operator()(const VectorXd& x) const {
  double s = 0.0;
  for (const auto& post : posteriors_) {
    if (kind_ == ModelKind::tp) {
      const auto p = post.point_tp(x);
      s += ei_tp(f_best_, p.mean, p.variance, p.dof);
    } else {
      const auto p = post.point_gp(x);
      s += ei_gaussian(f_best_, p.mean, p.variance);
    }
  }
  return s / static_cast<double>(posteriors_.size());
}

double marginalized_ei(const VectorXd& x, const Dataset& data, const PosteriorSampleSet& samples,
                       const KernelSpec& spec, ModelKind kind) {
  return Acquisition(data, samples.samples, spec, kind)(x);
}

namespace {

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

int nth_prime(Eigen::Index n) {
  int count = 0;
  for (int c = 2;; ++c) {
    bool prime = true;
    for (int d = 2; d * d <= c; ++d) {
      if (c % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime && count++ == n) return c;
  }
}

VectorXd clamp_unit(VectorXd u) { return u.cwiseMax(0.0).cwiseMin(1.0); }

struct Scaled {
  const std::function<double(const VectorXd&)>& f;
  const VectorXd& lower;
  VectorXd width;

  VectorXd to_x(const VectorXd& u) const { return lower + u.cwiseProduct(width); }
  double operator()(const VectorXd& u) const { return f(to_x(u)); }
};

// Projected gradient ascent in unit-cube coordinates with central differences.
VectorXd refine(const Scaled& g, VectorXd u, double& value, int steps) {
  constexpr double h = 1e-6;
  double t = 0.05;
  for (int s = 0; s < steps && t > 1e-10; ++s) {
    VectorXd grad(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      VectorXd up = u;
      VectorXd dn = u;
      up(i) = std::min(u(i) + h, 1.0);
      dn(i) = std::max(u(i) - h, 0.0);
      grad(i) = (g(up) - g(dn)) / (up(i) - dn(i));
    }
    const double norm = grad.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) break;
    const VectorXd trial = clamp_unit(u + (t / norm) * grad);
    const double tv = g(trial);
    if (tv > value) {
      u = trial;
      value = tv;
      t = std::min(1.5 * t, 0.5);
    } else {
      t *= 0.5;
    }
  }
  return u;
}

}  // namespace

MatrixXd shifted_halton(Eigen::Index count, Eigen::Index dim, RngHandle& rng) {
  MatrixXd pts(count, dim);
  for (Eigen::Index d = 0; d < dim; ++d) {
    const int base = nth_prime(d);
    const double shift = rng.uniform();
    for (Eigen::Index i = 0; i < count; ++i) {
      const double v = radical_inverse(static_cast<std::uint64_t>(i + 1), base) + shift;
      pts(i, d) = v - std::floor(v);
    }
  }
  return pts;
}

Proposal propose_next(const std::function<double(const VectorXd&)>& acquisition, const VectorXd& lower,
                      const VectorXd& upper, const SearchConfig& search, RngHandle& rng) {
  if (lower.size() == 0 || lower.size() != upper.size()) throw DimensionMismatch("propose_next: invalid bounds");
  if (!((upper - lower).array() > 0.0).all()) throw DomainError("propose_next: empty box");
  if (search.candidates_per_dim < 1 || search.refine_top < 0 || search.refine_steps < 0) {
    throw DomainError("propose_next: invalid search configuration");
  }
  const Eigen::Index dim = lower.size();
  const Scaled g{acquisition, lower, upper - lower};
  const MatrixXd cand = shifted_halton(search.candidates_per_dim * dim, dim, rng);

  std::vector<double> values(static_cast<std::size_t>(cand.rows()));
  for (Eigen::Index i = 0; i < cand.rows(); ++i) values[static_cast<std::size_t>(i)] = g(cand.row(i).transpose());

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  Proposal best;
  best.candidate_best = values[order[0]];
  VectorXd best_u = cand.row(static_cast<Eigen::Index>(order[0])).transpose();
  double best_v = best.candidate_best;
  const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(search.refine_top), order.size());
  for (std::size_t k = 0; k < top; ++k) {
    double v = values[order[k]];
    const VectorXd u = refine(g, cand.row(static_cast<Eigen::Index>(order[k])).transpose(), v, search.refine_steps);
    if (v > best_v) {
      best_v = v;
      best_u = u;
    }
  }
  best.x = g.to_x(best_u).cwiseMax(lower).cwiseMin(upper);
  best.acquisition = best_v;
  return best;
}

Proposal propose_next(const Dataset& data, const PosteriorSampleSet& samples, const KernelSpec& spec,
                      ModelKind kind, const VectorXd& lower, const VectorXd& upper, const SearchConfig& search,
                      RngHandle& rng) {
  const Acquisition acq(data, samples.samples, spec, kind);
  return propose_next([&](const VectorXd& x) { return acq(x); }, lower, upper, search, rng);
}

void BoProblem::validate() const {
  if (!objective) throw DomainError("bo: missing objective");
  if (lower.size() == 0 || lower.size() != upper.size()) throw DimensionMismatch("bo: invalid bounds");
  if (!(lower.array() < upper.array()).all()) throw DomainError("bo: lower bound must be below upper bound");
  if (initial_design.rows() < 1 || initial_design.cols() != lower.size()) {
    throw DimensionMismatch("bo: initial design must have one column per input dimension");
  }
  for (Eigen::Index i = 0; i < initial_design.rows(); ++i) {
    const VectorXd r = initial_design.row(i).transpose();
    if (!((r.array() >= lower.array()).all() && (r.array() <= upper.array()).all())) {
      throw DomainError("bo: initial design outside bounds");
    }
  }
}

double BoTrace::best() const {
  if (!iterations.empty()) return iterations.back().best;
  if (!initial.empty()) return initial.back().best;
  return std::numeric_limits<double>::infinity();
}

std::optional<int> BoTrace::iterations_to(double target, double rel_tol) const {
  for (std::size_t i = 0; i < iterations.size(); ++i) {
    if (std::abs(iterations[i].best - target) <= rel_tol * std::abs(target)) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

BoTrace bo_run(const BoProblem& problem, ModelKind surrogate, int budget, const BoConfig& config, std::uint64_t seed) {
  problem.validate();
  if (budget < 1) throw DomainError("bo: budget must be at least 1");
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  RngHandle sampler_rng = RngHandle(seed).derive(1);
  RngHandle search_rng = RngHandle(seed).derive(2);
  const Eigen::Index dim = problem.lower.size();
  const KernelSpec spec{KernelFamily::matern52_ard, dim, true};

  BoTrace trace;
  trace.surrogate = surrogate;
  trace.seed = seed;

  const Eigen::Index n0 = problem.initial_design.rows();
  Dataset data{MatrixXd(n0, dim), VectorXd(n0)};
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n0; ++i) {
    const VectorXd x = problem.initial_design.row(i).transpose();
    double f = 0.0;
    try {
      f = problem.objective(x);
    } catch (const std::exception& e) {
      trace.aborted = e.what();
      return trace;
    }
    if (!std::isfinite(f)) {
      trace.aborted = "objective returned a non-finite value";
      return trace;
    }
    best = std::min(best, f);
    data.x.row(i) = x.transpose();
    data.y(i) = f;
    trace.initial.push_back({x, f, best, std::numeric_limits<double>::quiet_NaN(), elapsed()});
  }

  std::optional<HyperParams> chain;
  for (int it = 0; it < budget; ++it) {
    Dataset model_data = data;
    if (config.standardize && data.size() > 1) {
      const double m = data.y.mean();
      const double sd = std::sqrt((data.y.array() - m).square().sum() / static_cast<double>(data.size() - 1));
      if (sd > 0.0) model_data.y = (data.y.array() - m) / sd;
    }
    const PosteriorSampleSet post =
        slice_sample_posterior(model_data, spec, surrogate, config.priors, config.sampler, sampler_rng, chain);
    if (config.warm_start) chain = unpack(post.final_state, spec, surrogate, post.samples.back());
    const Proposal next =
        propose_next(model_data, post, spec, surrogate, problem.lower, problem.upper, config.search, search_rng);

    double f = 0.0;
    try {
      f = problem.objective(next.x);
    } catch (const std::exception& e) {
      trace.aborted = e.what();
      return trace;
    }
    if (!std::isfinite(f)) {
      trace.aborted = "objective returned a non-finite value";
      return trace;
    }
    best = std::min(best, f);
    data.x.conservativeResize(data.x.rows() + 1, Eigen::NoChange);
    data.y.conservativeResize(data.y.size() + 1);
    data.x.row(data.x.rows() - 1) = next.x.transpose();
    data.y(data.y.size() - 1) = f;
    trace.iterations.push_back({next.x, f, best, next.acquisition, elapsed()});
  }
  return trace;
}

}  // namespace tprocess
