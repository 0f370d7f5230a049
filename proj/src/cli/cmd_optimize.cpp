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

#include <cmath>
#include <limits>

#include "tprocess/cli/commands.hpp"
#include "tprocess/cli/config.hpp"
#include "tprocess/cli/dataset_io.hpp"
#include "tprocess/cli/output.hpp"
#include "tprocess/error.hpp"
#include "tprocess/objectives.hpp"

namespace tprocess::cli {

namespace {

struct OptimizeConfig {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string benchmark;
  std::string lookup_path;
  std::vector<ModelKind> surrogates;
  int runs = 50;
  int budget = 20;
  double tolerance = 1e-3;
  BoConfig bo;
};

/// Nearest-row lookup over a CSV table of inputs and values.
Benchmark lookup_benchmark(const std::string& path) {
  const MatrixXd table = read_table(path);
  if (table.cols() < 2) throw DataError("lookup table needs input columns and a value column");
  const Eigen::Index dim = table.cols() - 1;
  Benchmark b;
  b.name = "lookup";
  const MatrixXd x = table.leftCols(dim);
  const VectorXd y = table.col(dim);
  b.lower = x.colwise().minCoeff().transpose();
  b.upper = x.colwise().maxCoeff().transpose();
  for (Eigen::Index d = 0; d < dim; ++d) {
    if (!(b.upper(d) > b.lower(d))) throw DataError("lookup table input column " + std::to_string(d) + " is constant");
  }
  const VectorXd width = b.upper - b.lower;
  const VectorXd lo = b.lower;
  const VectorXd hi = b.upper;
  b.objective = [x, y, width, lo, hi](const VectorXd& q) {
    if (q.size() != x.cols()) throw DimensionMismatch("lookup: wrong input dimension");
    if (!((q.array() >= lo.array()).all() && (q.array() <= hi.array()).all())) {
      throw OutOfDomain("lookup: input outside the table's bounding box");
    }
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double d = ((x.row(i).transpose() - q).array() / width.array()).square().sum();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return y(best);
  };
  b.initial_design.resize(2, dim);
  b.initial_design.row(0) = b.lower.transpose();
  b.initial_design.row(1) = b.upper.transpose();
  b.minimum = y.minCoeff();
  return b;
}

OptimizeConfig parse(ConfigNode& root, Benchmark& bench) {
  OptimizeConfig c;
  c.seed = root.unsigned_integer("seed", 0);
  c.threads = static_cast<int>(root.integer("threads", 1, 1));
  c.benchmark = root.choice("benchmark", "sinusoidal", {"sinusoidal", "branin", "hartmann6", "lookup"});
  {
    ConfigNode l = root.child("lookup");
    c.lookup_path = l.text("path", "");
    if (c.benchmark == "lookup" && c.lookup_path.empty()) l.fail("path", "required when benchmark is lookup");
    l.finish();
  }
  bench = c.benchmark == "lookup" ? lookup_benchmark(c.lookup_path) : make_benchmark(c.benchmark);
  const MatrixXd design = root.matrix("initial_design", bench.initial_design);
  if (design.cols() != bench.lower.size()) {
    root.fail("initial_design", "rows need " + std::to_string(bench.lower.size()) + " entries");
  }
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    for (Eigen::Index d = 0; d < design.cols(); ++d) {
      if (design(i, d) < bench.lower(d) || design(i, d) > bench.upper(d)) root.fail("initial_design", "point outside bounds");
    }
  }
  bench.initial_design = design;
  for (const auto& s : root.choice_list("surrogates", {"tp", "gp"}, {"tp", "gp"})) {
    c.surrogates.push_back(model_kind_from_string(s));
  }
  c.runs = static_cast<int>(root.integer("runs", 50, 1));
  c.budget = static_cast<int>(root.integer("budget", 20, 1));
  c.tolerance = root.positive("tolerance", 1e-3);
  c.bo.sampler = parse_sampler(root.child("sampler"), BoConfig{}.sampler);
  c.bo.search = parse_search(root.child("search"));
  c.bo.priors = parse_priors(root.child("priors"));
  c.bo.warm_start = root.boolean("warm_start", true);
  c.bo.standardize = root.boolean("standardize", false);
  root.finish();
  return c;
}

std::uint64_t run_seed(std::uint64_t seed, int run) {
  return mix_seed(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(run + 1));
}

}  // namespace

int cmd_optimize(const CommandArgs& args) {
  Json config = load_command_config(args.config_path, args.seed);
  Benchmark bench;
  ConfigNode root(config, "");
  const OptimizeConfig c = parse(root, bench);
  const std::string hash = config_hash(config);
  const OutputDir out(args.out_dir, c.seed, hash);
  out.write_json("config.json", config);

  const BoProblem problem{bench.objective, bench.lower, bench.upper, bench.initial_design};
  const std::size_t ns = c.surrogates.size();
  const std::size_t nr = static_cast<std::size_t>(c.runs);
  std::vector<BoTrace> traces(ns * nr);
  parallel_for(traces.size(), c.threads, [&](std::size_t k) {
    const ModelKind s = c.surrogates[k / nr];
    traces[k] = bo_run(problem, s, c.budget, c.bo, run_seed(c.seed, static_cast<int>(k % nr)));
  });

  const Eigen::Index dim = bench.lower.size();
  std::ofstream trace_file = out.open("trace.csv");
  CsvWriter trace(trace_file);
  trace.cell("surrogate").cell("run").cell("seed").cell("row").cell("phase").cell("iteration");
  for (Eigen::Index d = 0; d < dim; ++d) trace.cell("x" + std::to_string(d));
  trace.cell("f").cell("best").cell("acquisition").end_row();

  Json result;
  result["command"] = "optimize";
  result["version"] = artifact_version();
  result["seed"] = c.seed;
  result["config_hash"] = hash;
  result["config"] = config;
  result["benchmark"] = {{"name", bench.name},
                         {"minimum", bench.minimum},
                         {"lower", to_json(bench.lower)},
                         {"upper", to_json(bench.upper)}};

  std::ofstream curve_file = out.open("best_curve.csv");
  CsvWriter curve(curve_file);
  curve.cell("surrogate").cell("iteration").cell("runs").cell("mean_best").cell("sd_best").end_row();
  std::ofstream summary_file = out.open("summary.csv");
  CsvWriter summary(summary_file);
  summary.cell("surrogate").cell("runs").cell("reached").cell("mean_iterations").cell("se_iterations").end_row();

  Json timings;
  Json surrogates;
  for (std::size_t si = 0; si < ns; ++si) {
    const std::string name = to_string(c.surrogates[si]);
    Json runs = Json::array();
    Json run_times = Json::array();
    VectorXd iters(static_cast<Eigen::Index>(nr));
    long reached = 0;
    for (std::size_t r = 0; r < nr; ++r) {
      const BoTrace& t = traces[si * nr + r];
      long row = 0;
      Json times = Json::array();
      const auto emit = [&](const BoRecord& rec, const char* phase, long iteration) {
        trace.cell(name).cell(static_cast<long long>(r)).cell(std::to_string(t.seed)).cell(static_cast<long long>(++row))
            .cell(phase).cell(static_cast<long long>(iteration));
        for (Eigen::Index d = 0; d < dim; ++d) trace.cell(rec.x(d));
        trace.cell(rec.f).cell(rec.best).cell(rec.acquisition).end_row();
        times.push_back(rec.elapsed_seconds);
      };
      for (const auto& rec : t.initial) emit(rec, "initial", 0);
      for (std::size_t i = 0; i < t.iterations.size(); ++i) emit(t.iterations[i], "bo", static_cast<long>(i) + 1);

      const std::optional<int> hit = t.iterations_to(bench.minimum, c.tolerance);
      reached += hit.has_value();
      iters(static_cast<Eigen::Index>(r)) = hit ? *hit : c.budget + 1;
      Json jr = {{"run", r},
                 {"seed", t.seed},
                 {"iterations_to_tolerance", hit ? Json(*hit) : Json(nullptr)},
                 {"final_best", t.best()},
                 {"evaluations", t.initial.size() + t.iterations.size()}};
      if (t.aborted) jr["aborted"] = *t.aborted;
      runs.push_back(jr);
      run_times.push_back(times);
    }
    const double n = static_cast<double>(nr);
    const double se = nr > 1 ? std::sqrt((iters.array() - iters.mean()).square().sum() / (n - 1.0) / n)
                             : std::numeric_limits<double>::quiet_NaN();
    surrogates[name] = {{"runs", runs},
                        {"reached", reached},
                        {"mean_iterations_to_tolerance", iters.mean()},
                        {"se_iterations_to_tolerance", se},
                        {"censored_at", c.budget + 1}};
    summary.cell(name).cell(static_cast<long long>(nr)).cell(static_cast<long long>(reached)).cell(iters.mean()).cell(se)
        .end_row();
    timings[name] = run_times;

    for (int it = 0; it <= c.budget; ++it) {
      std::vector<double> v;
      for (std::size_t r = 0; r < nr; ++r) {
        const BoTrace& t = traces[si * nr + r];
        if (it == 0 && !t.initial.empty()) v.push_back(t.initial.back().best);
        if (it > 0 && static_cast<std::size_t>(it) <= t.iterations.size()) v.push_back(t.iterations[it - 1].best);
      }
      if (v.empty()) continue;
      const Eigen::Map<const VectorXd> vv(v.data(), static_cast<Eigen::Index>(v.size()));
      const double sd = v.size() > 1 ? std::sqrt((vv.array() - vv.mean()).square().sum() / (vv.size() - 1.0)) : 0.0;
      curve.cell(name).cell(static_cast<long long>(it)).cell(static_cast<long long>(v.size())).cell(vv.mean()).cell(sd)
          .end_row();
    }
  }
  result["surrogates"] = surrogates;
  out.write_json("result.json", result);
  out.write_json("timings.json", Json{{"elapsed_seconds", timings}});
  return 0;
}

}  // namespace tprocess::cli
