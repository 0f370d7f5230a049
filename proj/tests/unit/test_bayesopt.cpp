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

#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "support.hpp"
#include "tprocess/bayesopt.hpp"
#include "tprocess/objectives.hpp"

using namespace tprocess;
using tprocess::testing::rel_err;
using tprocess::testing::uniform_in;

namespace {

// Integral of (f_best - y) over y < f_best against a Student-t density with covariance `scale`.
double ei_quadrature(double f_best, double mean, double scale, double dof) {
  const boost::math::students_t_distribution<double> t(dof);
  const double s = std::sqrt(scale * (dof - 2.0) / dof);
  const auto integrand = [&](double u) { return u * boost::math::pdf(t, (f_best - u - mean) / s) / s; };
  return boost::math::quadrature::exp_sinh<double>().integrate(integrand, 1e-13);
}

KernelSpec se1(bool noise) { return KernelSpec{KernelFamily::squared_exponential_ard, 1, noise}; }

HyperParams hyper(double amp, double ls, double noise, double nu) {
  return HyperParams::make(KernelParams::from_values(amp, VectorXd::Constant(1, ls), noise), nu, 0.0);
}

BoConfig quick_config() {
  BoConfig c;
  c.sampler.samples = 3;
  c.sampler.burn_in = 5;
  c.search.candidates_per_dim = 100;
  c.search.refine_top = 3;
  c.search.refine_steps = 20;
  return c;
}

}  // namespace

TEST_CASE("expected improvement limits and errors") {
  CHECK(ei_tp(1.0, 0.3, 0.0, 5.0) == doctest::Approx(0.7));
  CHECK(ei_tp(1.0, 0.3, 1e-30, 5.0) == doctest::Approx(0.7));
  CHECK(ei_tp(1.0, 1.3, 1e-30, 5.0) == doctest::Approx(0.0));
  CHECK(ei_gaussian(1.0, 0.3, 0.0) == doctest::Approx(0.7));
  CHECK_THROWS_AS(ei_tp(1.0, 0.0, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(ei_tp(1.0, 0.0, -1.0, 5.0), DomainError);
  CHECK_THROWS_AS(ei_gaussian(1.0, 0.0, -1.0), DomainError);
  PredictiveDist p;
  p.dof = 6.0;
  p.mean = VectorXd::Constant(1, 0.2);
  p.scale = SpdMatrix(MatrixXd::Constant(1, 1, 0.4));
  CHECK(ei_tp(0.5, p) == doctest::Approx(ei_tp(0.5, 0.2, 0.4, 6.0)));
}

TEST_CASE("closed form matches quadrature") {
  RngHandle rng(71);
  for (int i = 0; i < 200; ++i) {
    const double dof = 2.05 + std::exp(uniform_in(rng, 0.0, 5.0));
    const double scale = std::exp(uniform_in(rng, -4.0, 2.0));
    const double mean = rng.normal();
    const double f_best = mean + std::sqrt(scale) * uniform_in(rng, -3.0, 3.0);
    CHECK(rel_err(ei_tp(f_best, mean, scale, dof), ei_quadrature(f_best, mean, scale, dof)) < 1e-6);
  }
}

TEST_CASE("Gaussian limit") {
  RngHandle rng(72);
  const boost::math::normal_distribution<double> nd;
  for (int i = 0; i < 200; ++i) {
    const double sd = std::exp(uniform_in(rng, -2.0, 1.0));
    const double gamma = uniform_in(rng, -2.0, 3.0);
    const double mean = rng.normal();
    const double f_best = mean + gamma * sd;
    const double oracle = sd * (gamma * boost::math::cdf(nd, gamma) + boost::math::pdf(nd, gamma));
    CHECK(rel_err(ei_gaussian(f_best, mean, sd * sd), oracle) < 1e-12);
    CHECK(rel_err(ei_tp(f_best, mean, sd * sd, 1e6), oracle) < 1e-5);
  }
}

TEST_CASE("monotonicity") {
  double last = -1.0;
  for (double fb = -3.0; fb <= 3.0; fb += 0.25) {
    const double v = ei_tp(fb, 0.0, 1.0, 4.0);
    CHECK(v >= last);
    last = v;
  }
  last = 0.0;
  for (double s : {0.01, 0.1, 1.0, 10.0}) {
    const double v = ei_tp(0.0, 0.0, s, 4.0);
    CHECK(v > last);
    last = v;
  }
}

TEST_CASE("marginalized acquisition") {
  RngHandle rng(73);
  const KernelSpec spec = se1(true);
  Dataset data{MatrixXd(3, 1), VectorXd(3)};
  data.x << 0.0, 1.0, 2.5;
  data.y << 0.4, -0.2, 0.9;
  const HyperParams a = hyper(1.0, 0.8, 0.01, 5.0);
  const HyperParams b = hyper(2.0, 0.5, 0.02, 3.0);
  const VectorXd x = VectorXd::Constant(1, 1.7);
  PosteriorSampleSet one;
  one.samples = {a};
  const ProcessPosterior pa(data, a, spec);
  const auto pt = pa.point_tp(x);
  CHECK(marginalized_ei(x, data, one, spec) == doctest::Approx(ei_tp(-0.2, pt.mean, pt.variance, pt.dof)));
  PosteriorSampleSet two;
  two.samples = {a, b};
  PosteriorSampleSet four;
  four.samples = {a, b, a, b};
  CHECK(marginalized_ei(x, data, two, spec) == doctest::Approx(marginalized_ei(x, data, four, spec)));
  const Acquisition acq(data, two.samples, spec, ModelKind::gp);
  CHECK(acq.f_best() == doctest::Approx(-0.2));
  CHECK(acq.size() == 2);
  for (int i = 0; i < 50; ++i) CHECK(acq(VectorXd::Constant(1, uniform_in(rng, -2.0, 5.0))) >= 0.0);
  CHECK_THROWS_AS(Acquisition(data, {}, spec, ModelKind::tp), DomainError);
}

TEST_CASE("proposal search") {
  RngHandle rng(74);
  const auto bimodal = [](const VectorXd& x) {
    return std::exp(-std::pow(x(0) - 0.2, 2) / 0.01) + 1.2 * std::exp(-std::pow(x(0) - 0.7, 2) / 0.005);
  };
  double grid_best = 0.0;
  for (int i = 0; i < 10000; ++i) grid_best = std::max(grid_best, bimodal(VectorXd::Constant(1, i / 9999.0)));
  const Proposal p = propose_next(bimodal, VectorXd::Zero(1), VectorXd::Ones(1), SearchConfig{}, rng);
  CHECK(p.acquisition >= p.candidate_best);
  CHECK(p.acquisition >= grid_best - 1e-9);
  CHECK(std::abs(p.x(0) - 0.7) < 1e-3);

  const auto box = [](const VectorXd& x) { return x.sum(); };
  const Proposal q = propose_next(box, VectorXd::Constant(3, -1.0), VectorXd::Constant(3, 2.0), SearchConfig{}, rng);
  CHECK((q.x.array() <= 2.0).all());
  CHECK((q.x.array() >= -1.0).all());
  CHECK(q.acquisition == doctest::Approx(6.0).epsilon(1e-6));

  const MatrixXd h = shifted_halton(500, 2, rng);
  CHECK(h.minCoeff() >= 0.0);
  CHECK(h.maxCoeff() < 1.0);
  CHECK(std::abs(h.col(0).mean() - 0.5) < 0.01);
}

TEST_CASE("two-observation toy posterior") {
  const KernelSpec spec = se1(true);
  Dataset data{MatrixXd(2, 1), VectorXd(2)};
  data.x << 1.0, 9.0;
  data.y << -0.5, 0.5;
  PosteriorSampleSet s;
  s.samples = {hyper(1.0, 1.5, 0.01, 5.0)};
  double grid_best = 0.0;
  for (int i = 0; i < 10000; ++i) {
    grid_best = std::max(grid_best, marginalized_ei(VectorXd::Constant(1, 10.0 * i / 9999.0), data, s, spec));
  }
  RngHandle r1(5);
  RngHandle r2(5);
  const Proposal a = propose_next(data, s, spec, ModelKind::tp, VectorXd::Zero(1), VectorXd::Constant(1, 10.0),
                                  SearchConfig{}, r1);
  const Proposal b = propose_next(data, s, spec, ModelKind::tp, VectorXd::Zero(1), VectorXd::Constant(1, 10.0),
                                  SearchConfig{}, r2);
  CHECK(a.x == b.x);
  CHECK(a.acquisition >= grid_best - 1e-9);
  const bool in_gap = a.x(0) > 2.5 && a.x(0) < 7.5;
  const bool near_best = std::abs(a.x(0) - 1.0) < 1.5;
  CHECK((in_gap || near_best));
}

TEST_CASE("degrees of freedom change the proposal") {
  const KernelSpec spec = se1(true);
  Dataset data{MatrixXd(2, 1), VectorXd(2)};
  data.x << 2.0, 8.0;
  data.y << -3.0, 3.0;
  PosteriorSampleSet tp;
  tp.samples = {hyper(1.0, 1.0, 0.01, 5.0)};
  const auto argmax = [&](ModelKind kind) {
    double best = -1.0;
    double at = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double x = 10.0 * i / 9999.0;
      const double v = marginalized_ei(VectorXd::Constant(1, x), data, tp, spec, kind);
      if (v > best) {
        best = v;
        at = x;
      }
    }
    return at;
  };
  const double xt = argmax(ModelKind::tp);
  const double xg = argmax(ModelKind::gp);
  MESSAGE("argmax tp " << xt << " gp " << xg);
  CHECK(std::abs(xt - xg) > 1e-3);
}

TEST_CASE("optimization loop") {
  const Benchmark bench = make_benchmark("sinusoidal");
  const BoProblem problem{bench.objective, bench.lower, bench.upper, bench.initial_design};
  const BoTrace one = bo_run(problem, ModelKind::tp, 1, quick_config(), 3);
  CHECK(one.initial.size() == 2);
  CHECK(one.iterations.size() == 1);
  CHECK(std::isnan(one.initial[0].acquisition));
  CHECK(one.iterations[0].acquisition >= 0.0);
  CHECK_THROWS_AS(bo_run(problem, ModelKind::tp, 0, quick_config(), 3), DomainError);

  for (ModelKind kind : {ModelKind::tp, ModelKind::gp}) {
    const BoTrace a = bo_run(problem, kind, 6, quick_config(), 11);
    const BoTrace b = bo_run(problem, kind, 6, quick_config(), 11);
    REQUIRE(a.iterations.size() == 6);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : a.initial) best = std::min(best, r.f);
    for (std::size_t i = 0; i < a.iterations.size(); ++i) {
      CHECK(a.iterations[i].x == b.iterations[i].x);
      CHECK(a.iterations[i].f == b.iterations[i].f);
      CHECK(a.iterations[i].best <= best);
      best = std::min(best, a.iterations[i].f);
      CHECK(a.iterations[i].best == best);
      CHECK(a.iterations[i].x(0) >= 5.0);
      CHECK(a.iterations[i].x(0) <= 10.0);
    }
    CHECK(a.best() == best);
    CHECK(!a.aborted);
  }
}

TEST_CASE("iterations to tolerance") {
  BoTrace t;
  t.initial = {BoRecord{VectorXd::Zero(1), 5.0, 5.0, std::nan(""), 0.0}};
  for (double f : {3.0, 1.0005, 2.0, 1.0}) {
    const double best = std::min(t.iterations.empty() ? 5.0 : t.iterations.back().best, f);
    t.iterations.push_back(BoRecord{VectorXd::Zero(1), f, best, 0.1, 0.0});
  }
  CHECK(t.iterations_to(1.0, 1e-3) == 2);
  CHECK(t.iterations_to(1.0, 1e-5) == 4);
  CHECK(!t.iterations_to(0.5, 1e-3));
}

TEST_CASE("objective failure leaves a partial trace") {
  int calls = 0;
  BoProblem problem;
  problem.lower = VectorXd::Zero(1);
  problem.upper = VectorXd::Ones(1);
  problem.initial_design = (MatrixXd(2, 1) << 0.1, 0.9).finished();
  problem.objective = [&](const VectorXd& x) {
    if (++calls > 4) throw ObjectiveFailure("simulator crashed");
    return std::sin(6.0 * x(0));
  };
  const BoTrace t = bo_run(problem, ModelKind::gp, 10, quick_config(), 1);
  CHECK(t.aborted.has_value());
  CHECK(t.iterations.size() == 2);
  calls = 0;
  problem.objective = [&](const VectorXd&) { return ++calls > 3 ? std::nan("") : 1.0; };
  const BoTrace u = bo_run(problem, ModelKind::gp, 10, quick_config(), 1);
  CHECK(u.aborted.has_value());
  CHECK(u.iterations.size() == 1);
}
