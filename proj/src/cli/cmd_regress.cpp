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

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "tprocess/cli/commands.hpp"
#include "tprocess/cli/config.hpp"
#include "tprocess/cli/dataset_io.hpp"
#include "tprocess/cli/output.hpp"
#include "tprocess/error.hpp"

namespace tprocess::cli {

namespace {

struct RegressConfig {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string source;
  SyntheticConfig synthetic;
  int replications = 1;
  std::string csv_path;
  std::string csv_test_path;
  Eigen::Index csv_n_test = 20;
  bool standardize = true;
  std::vector<ModelKind> models;
  std::string family;
  bool include_noise = true;
  Json kernel_block;
  double nu = 5.0;
  double mean = 0.0;
  std::string inference;
  OptimizerConfig optimizer;
  SamplerConfig sampler;
  PriorSet priors;
  bool observation_noise = true;
};

struct ModelOutcome {
  ModelKind kind = ModelKind::tp;
  Metrics metrics;
  double joint_ll = 0.0;
  Json detail;
  VectorXd mean;
  VectorXd sd;
  double seconds = 0.0;
};

struct Replication {
  Dataset train;
  Dataset test;
  Standardization standardization;
  std::vector<ModelOutcome> outcomes;
};

Json hyper_json(const HyperParams& hp, const KernelSpec& spec, ModelKind kind) {
  Json j;
  j["amplitude"] = hp.kernel.amplitude();
  j["lengthscales"] = to_json(hp.kernel.log_lengthscales.array().exp().matrix());
  if (spec.include_noise) j["noise"] = hp.kernel.noise();
  if (kind == ModelKind::tp) j["nu"] = hp.nu();
  j["mean"] = hp.mean_mu;
  return j;
}

double log_mean_exp(const std::vector<double>& v) {
  double top = -std::numeric_limits<double>::infinity();
  for (double x : v) top = std::max(top, x);
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (double x : v) s += std::exp(x - top);
  return top + std::log(s / static_cast<double>(v.size()));
}

template <typename Pred>
void mixture_moments(const std::vector<Pred>& preds, VectorXd& mean, VectorXd& sd) {
  const Eigen::Index m = preds.front().mean.size();
  mean = VectorXd::Zero(m);
  VectorXd second = VectorXd::Zero(m);
  for (const auto& p : preds) {
    const MatrixXd& c = [&]() -> const MatrixXd& {
      if constexpr (std::is_same_v<Pred, PredictiveDist>) return p.scale.matrix();
      else return p.cov.matrix();
    }();
    mean += p.mean;
    second += (c.diagonal().array() + p.mean.array().square()).matrix();
  }
  const double h = static_cast<double>(preds.size());
  mean /= h;
  sd = (second.array() / h - mean.array().square()).max(0.0).sqrt().matrix();
}

ModelOutcome fit_model(const RegressConfig& c, const Replication& rep, const Dataset& train_std, ModelKind kind,
                       const KernelSetup& kernel, RngHandle rng) {
  const auto start = std::chrono::steady_clock::now();
  ModelOutcome out;
  out.kind = kind;
  HyperParams init;
  init.kernel = kernel.params;
  init.nu_tilde = HyperParams::nu_tilde_for(c.nu);
  init.mean_mu = c.mean;
  const MatrixXd& xs = rep.test.x;
  const VectorXd& ys = rep.test.y;

  if (c.inference == "slice") {
    const PosteriorSampleSet set = slice_sample_posterior(train_std, kernel.spec, kind, c.priors, c.sampler, rng, init);
    Json samples = Json::array();
    std::vector<double> joints;
    if (kind == ModelKind::tp) {
      std::vector<PredictiveDist> preds;
      for (const auto& hp : set.samples) {
        preds.push_back(rep.standardization.invert(ProcessPosterior(train_std, hp, kernel.spec).predict_tp(xs, c.observation_noise)));
        joints.push_back(joint_log_likelihood(preds.back(), ys));
        samples.push_back(hyper_json(hp, kernel.spec, kind));
      }
      out.metrics = evaluate_metrics(preds, ys);
      mixture_moments(preds, out.mean, out.sd);
    } else {
      std::vector<GaussianPredictive> preds;
      for (const auto& hp : set.samples) {
        preds.push_back(rep.standardization.invert(ProcessPosterior(train_std, hp, kernel.spec).predict_gp(xs, c.observation_noise)));
        joints.push_back(joint_log_likelihood(preds.back(), ys));
        samples.push_back(hyper_json(hp, kernel.spec, kind));
      }
      out.metrics = evaluate_metrics(preds, ys);
      mixture_moments(preds, out.mean, out.sd);
    }
    out.joint_ll = log_mean_exp(joints);
    out.detail["samples"] = samples;
    out.detail["sampler"] = {{"density_evaluations", set.density_evaluations},
                             {"mean_step_outs", set.mean_step_outs},
                             {"mean_shrinks", set.mean_shrinks}};
  } else {
    OptimizerConfig oc = c.optimizer;
    oc.use_priors = c.inference == "map";
    const FitResult fit = fit_map(train_std, kernel.spec, kind, init, oc, c.priors, rng);
    const ProcessPosterior post(train_std, fit.hp, kernel.spec);
    if (kind == ModelKind::tp) {
      const PredictiveDist p = rep.standardization.invert(post.predict_tp(xs, c.observation_noise));
      out.metrics = evaluate_metrics(p, ys);
      out.joint_ll = joint_log_likelihood(p, ys);
      out.mean = p.mean;
      out.sd = p.scale.matrix().diagonal().array().sqrt().matrix();
    } else {
      const GaussianPredictive p = rep.standardization.invert(post.predict_gp(xs, c.observation_noise));
      out.metrics = evaluate_metrics(p, ys);
      out.joint_ll = joint_log_likelihood(p, ys);
      out.mean = p.mean;
      out.sd = p.cov.matrix().diagonal().array().sqrt().matrix();
    }
    out.detail["hyperparameters"] = hyper_json(fit.hp, kernel.spec, kind);
    out.detail["fit"] = {{"objective", fit.objective},
                         {"log_marginal", fit.log_marginal},
                         {"initial_log_marginal", fit.initial_log_marginal},
                         {"gradient_norm", fit.gradient_norm},
                         {"restarts_failed", fit.restarts_failed},
                         {"best_restart", fit.best_restart},
                         {"iterations", fit.trace.size()}};
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RegressConfig parse(Json& root_json) {
  ConfigNode root(root_json, "");
  RegressConfig c;
  c.seed = root.unsigned_integer("seed", 0);
  c.threads = static_cast<int>(root.integer("threads", 1, 1));

  ConfigNode data = root.child("data");
  c.source = data.choice("source", "synthetic", {"synthetic", "csv"});
  {
    ConfigNode s = data.child("synthetic");
    c.replications = static_cast<int>(s.integer("replications", 1, 1));
    c.synthetic.n_train = s.integer("n_train", 80, 1);
    c.synthetic.n_test = s.integer("n_test", 20, 0);
    if (c.source == "synthetic" && c.synthetic.n_test == 0) s.fail("n_test", "must be at least 1");
    c.synthetic.input_dim = s.integer("input_dim", 1, 1);
    c.synthetic.x_low = s.number("x_low", 0.0);
    c.synthetic.x_high = s.number("x_high", 10.0);
    if (!(c.synthetic.x_high > c.synthetic.x_low)) s.fail("x_high", "must exceed x_low");
    c.synthetic.amplitude = s.positive("amplitude", 1.0);
    c.synthetic.lengthscale = s.positive("lengthscale", 1.0);
    c.synthetic.noise = s.choice("noise", "gaussian", {"gaussian", "student_t"}) == "gaussian"
                            ? SyntheticConfig::Noise::gaussian
                            : SyntheticConfig::Noise::student_t;
    c.synthetic.noise_scale = s.positive("noise_scale", 0.1);
    c.synthetic.noise_dof = s.positive("noise_dof", 3.0);
    s.finish();
  }
  {
    ConfigNode s = data.child("csv");
    c.csv_path = s.text("path", "");
    c.csv_test_path = s.text("test_path", "");
    c.csv_n_test = s.integer("n_test", 20, 0);
    if (c.source == "csv") {
      if (c.csv_path.empty()) s.fail("path", "required when data.source is csv");
      if (c.csv_test_path.empty() && c.csv_n_test == 0) s.fail("n_test", "must be at least 1");
    }
    s.finish();
  }
  data.finish();

  c.standardize = root.boolean("standardize", true);
  for (const auto& m : root.choice_list("models", {"tp", "gp"}, {"tp", "gp"})) c.models.push_back(model_kind_from_string(m));
  {
    ConfigNode k = root.child("kernel");
    c.family = k.choice("family", "squared_exponential_ard", {"squared_exponential_ard", "matern52_ard"});
    c.include_noise = k.boolean("include_noise", true);
  }
  c.nu = root.number("nu", 5.0);
  if (!(c.nu > 2.0)) root.fail("nu", "must exceed 2");
  c.mean = root.number("mean", 0.0);
  c.inference = root.choice("inference", "map", {"map", "ml", "slice"});
  c.optimizer = parse_optimizer(root.child("optimizer"));
  c.sampler = parse_sampler(root.child("sampler"), SamplerConfig{});
  c.priors = parse_priors(root.child("priors"));
  c.observation_noise = root.boolean("observation_noise", true);
  root.finish();
  return c;
}

}  // namespace

int cmd_regress(const CommandArgs& args) {
  Json config = load_command_config(args.config_path, args.seed);
  RegressConfig c = parse(config);

  // Datasets.
  std::vector<Replication> reps;
  if (c.source == "synthetic") {
    reps.resize(static_cast<std::size_t>(c.replications));
    for (int r = 0; r < c.replications; ++r) {
      RngHandle rng = RngHandle(c.seed).derive(1000 + static_cast<std::uint64_t>(r));
      auto [train, test] = synthetic_regression(c.synthetic, rng);
      reps[static_cast<std::size_t>(r)].train = std::move(train);
      reps[static_cast<std::size_t>(r)].test = std::move(test);
    }
  } else {
    Replication rep;
    const Dataset all = read_dataset(c.csv_path);
    if (!c.csv_test_path.empty()) {
      rep.train = all;
      rep.test = read_dataset(c.csv_test_path);
      if (rep.test.dim() != rep.train.dim()) throw DataError("test file has a different number of feature columns");
    } else {
      if (c.csv_n_test >= all.size()) throw ConfigError("data.csv.n_test: must be smaller than the number of rows");
      RngHandle rng = RngHandle(c.seed).derive(999);
      std::vector<Eigen::Index> idx(static_cast<std::size_t>(all.size()));
      std::iota(idx.begin(), idx.end(), 0);
      for (std::size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[rng.next_u64() % (i + 1)]);
      std::vector<bool> is_test(idx.size(), false);
      for (Eigen::Index i = 0; i < c.csv_n_test; ++i) is_test[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = true;
      const Eigen::Index nt = c.csv_n_test;
      rep.train = Dataset{MatrixXd(all.size() - nt, all.dim()), VectorXd(all.size() - nt)};
      rep.test = Dataset{MatrixXd(nt, all.dim()), VectorXd(nt)};
      Eigen::Index a = 0, b = 0;
      for (Eigen::Index i = 0; i < all.size(); ++i) {
        Dataset& dst = is_test[static_cast<std::size_t>(i)] ? rep.test : rep.train;
        Eigen::Index& k = is_test[static_cast<std::size_t>(i)] ? b : a;
        dst.x.row(k) = all.x.row(i);
        dst.y(k) = all.y(i);
        ++k;
      }
    }
    reps.push_back(std::move(rep));
  }

  // Kernel block needs the input dimension, so it is parsed once the data is known.
  const Eigen::Index dim = reps.front().train.dim();
  KernelSetup kernel;
  {
    ConfigNode root(config, "");
    kernel = parse_kernel(root.child("kernel"), dim, c.family, c.include_noise);
  }
  const std::string hash = config_hash(config);
  const OutputDir out(args.out_dir, c.seed, hash);
  out.write_json("config.json", config);

  parallel_for(reps.size(), c.threads, [&](std::size_t r) {
    Replication& rep = reps[r];
    rep.standardization = c.standardize ? Standardization::fit(rep.train.y) : Standardization{};
    const Dataset train_std{rep.train.x, rep.standardization.apply(rep.train.y)};
    for (std::size_t m = 0; m < c.models.size(); ++m) {
      RngHandle rng = RngHandle(c.seed).derive(2000 + 2 * r + (c.models[m] == ModelKind::tp ? 0 : 1));
      rep.outcomes.push_back(fit_model(c, rep, train_std, c.models[m], kernel, std::move(rng)));
    }
  });

  // Per-replication records.
  Json result;
  result["command"] = "regress";
  result["version"] = artifact_version();
  result["seed"] = c.seed;
  result["config_hash"] = hash;
  result["config"] = config;
  Json rep_json = Json::array();
  Json timings = Json::array();
  std::ofstream metrics_file = out.open("metrics.csv");
  CsvWriter metrics(metrics_file);
  metrics.cell("replication").cell("model").cell("mse").cell("mean_log_likelihood").cell("log_likelihood_sum")
      .cell("joint_log_likelihood").end_row();
  std::ofstream pred_file = out.open("predictions.csv");
  CsvWriter preds(pred_file);
  preds.cell("replication").cell("model").cell("index");
  for (Eigen::Index d = 0; d < dim; ++d) preds.cell("x" + std::to_string(d));
  preds.cell("y").cell("mean").cell("sd").end_row();

  for (std::size_t r = 0; r < reps.size(); ++r) {
    const Replication& rep = reps[r];
    Json jr;
    jr["index"] = r;
    jr["n_train"] = rep.train.size();
    jr["n_test"] = rep.test.size();
    jr["standardization"] = {{"applied", c.standardize}, {"offset", rep.standardization.offset},
                             {"scale", rep.standardization.scale}};
    Json models;
    Json tj;
    for (const auto& o : rep.outcomes) {
      const std::string name = to_string(o.kind);
      Json jm = o.detail;
      jm["mse"] = o.metrics.mse;
      jm["mean_log_likelihood"] = o.metrics.mean_log_likelihood;
      jm["log_likelihood_sum"] = o.metrics.log_likelihood_sum;
      jm["joint_log_likelihood"] = o.joint_ll;
      models[name] = jm;
      tj[name] = o.seconds;
      metrics.cell(static_cast<long long>(r)).cell(name).cell(o.metrics.mse).cell(o.metrics.mean_log_likelihood)
          .cell(o.metrics.log_likelihood_sum).cell(o.joint_ll).end_row();
      for (Eigen::Index i = 0; i < rep.test.size(); ++i) {
        preds.cell(static_cast<long long>(r)).cell(name).cell(static_cast<long long>(i));
        for (Eigen::Index d = 0; d < dim; ++d) preds.cell(rep.test.x(i, d));
        preds.cell(rep.test.y(i)).cell(o.mean(i)).cell(o.sd(i)).end_row();
      }
    }
    jr["models"] = models;
    rep_json.push_back(jr);
    timings.push_back(tj);
  }
  result["replications"] = rep_json;

  // Aggregates: mean and standard error across replications.
  std::ofstream summary_file = out.open("summary.csv");
  CsvWriter summary(summary_file);
  summary.cell("model").cell("replications").cell("mse_mean").cell("mse_se").cell("ll_mean").cell("ll_se").end_row();
  Json aggregate;
  const double n = static_cast<double>(reps.size());
  for (std::size_t m = 0; m < c.models.size(); ++m) {
    VectorXd mse(static_cast<Eigen::Index>(reps.size()));
    VectorXd ll(static_cast<Eigen::Index>(reps.size()));
    for (std::size_t r = 0; r < reps.size(); ++r) {
      mse(static_cast<Eigen::Index>(r)) = reps[r].outcomes[m].metrics.mse;
      ll(static_cast<Eigen::Index>(r)) = reps[r].outcomes[m].metrics.mean_log_likelihood;
    }
    const auto se = [&](const VectorXd& v) {
      if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
      return std::sqrt((v.array() - v.mean()).square().sum() / (n - 1.0) / n);
    };
    const std::string name = to_string(c.models[m]);
    aggregate[name] = {{"mse_mean", mse.mean()}, {"mse_se", se(mse)}, {"ll_mean", ll.mean()}, {"ll_se", se(ll)}};
    summary.cell(name).cell(static_cast<long long>(reps.size())).cell(mse.mean()).cell(se(mse)).cell(ll.mean())
        .cell(se(ll)).end_row();
  }
  result["aggregate"] = aggregate;
  if (c.models.size() == 2) {
    const std::size_t tp = c.models[0] == ModelKind::tp ? 0 : 1;
    long wins = 0;
    for (const auto& rep : reps) wins += rep.outcomes[tp].metrics.mean_log_likelihood > rep.outcomes[1 - tp].metrics.mean_log_likelihood;
    result["comparison"] = {{"tp_ll_higher", wins}, {"replications", reps.size()}};
  }
  out.write_json("result.json", result);
  out.write_json("timings.json", Json{{"seconds_per_replication", timings}});
  return 0;
}

}  // namespace tprocess::cli
