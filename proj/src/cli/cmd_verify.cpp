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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "tprocess/bayesopt.hpp"
#include "tprocess/cli/commands.hpp"
#include "tprocess/cli/config.hpp"
#include "tprocess/cli/output.hpp"
#include "tprocess/distributions.hpp"
#include "tprocess/stats.hpp"
#include "tprocess/tp_model.hpp"

namespace tprocess::cli {

namespace {

struct Check {
  std::string name;
  double statistic = 0.0;
  std::string threshold;
  double p_value = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
};

double uniform_in(RngHandle& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

SpdMatrix random_spd(Eigen::Index n, RngHandle& rng) {
  const MatrixXd a = rng.normal_matrix(n, n);
  return SpdMatrix::symmetrized(a * a.transpose() + 0.5 * MatrixXd::Identity(n, n));
}

Check ks_check(const std::string& name, double d, double p, double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "p_value>%g", alpha);
  return Check{name, d, buf, p, p > alpha};
}

Check max_error_check(const std::string& name, double worst, double tol) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "max_error<%g", tol);
  return Check{name, worst, buf, std::numeric_limits<double>::quiet_NaN(), worst < tol};
}

double chain_rule_error(RngHandle& rng) {
  const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.next_u64() % 7);
  const Eigen::Index n1 = 1 + static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
  const MvtParams p{uniform_in(rng, 2.5, 30.0), rng.normal_vector(n), random_spd(n, rng)};
  const VectorXd y = p.phi + rng.normal_vector(n);
  std::vector<Eigen::Index> head(static_cast<std::size_t>(n1));
  for (Eigen::Index i = 0; i < n1; ++i) head[static_cast<std::size_t>(i)] = i;
  const double joint = mvt_log_pdf(p, y);
  const double marginal = mvt_log_pdf(mvt_marginal(p, head), y.head(n1));
  const double conditional = mvt_log_pdf(mvt_condition(p, n1, y.head(n1)).params, y.tail(n - n1));
  return std::abs(joint - marginal - conditional);
}

double gradient_error(RngHandle& rng, ModelKind kind) {
  const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng.next_u64() % 26);
  const Eigen::Index dim = 1 + static_cast<Eigen::Index>(rng.next_u64() % 3);
  const KernelFamily family =
      rng.uniform() < 0.5 ? KernelFamily::squared_exponential_ard : KernelFamily::matern52_ard;
  const KernelSpec spec{family, dim, true};
  const Dataset data{rng.normal_matrix(n, dim), rng.normal_vector(n)};
  HyperParams hp;
  hp.kernel = KernelParams::from_values(std::exp(uniform_in(rng, -1.0, 1.0)),
                                        (rng.normal_vector(dim) * 0.3).array().exp().matrix(),
                                        std::exp(uniform_in(rng, -3.0, 0.0)));
  hp.nu_tilde = uniform_in(rng, -1.0, 3.0);
  hp.mean_mu = rng.normal();

  VectorXd grad;
  log_marginal_and_grad(data, hp, spec, kind, grad);
  const VectorXd v = pack(hp, spec, kind);
  double worst = 0.0;
  constexpr double h = 1e-5;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    VectorXd a = v;
    VectorXd b = v;
    a(i) += h;
    b(i) -= h;
    const double fd = (log_marginal(data, unpack(a, spec, kind, hp), spec, kind) -
                       log_marginal(data, unpack(b, spec, kind, hp), spec, kind)) /
                      (2.0 * h);
    worst = std::max(worst, std::abs(fd - grad(i)) / std::max({std::abs(grad(i)), std::abs(fd), 1.0}));
  }
  return worst;
}

double ei_quadrature(double f_best, double mean, double scale, double dof) {
  const double tau = std::sqrt(scale);
  boost::math::quadrature::exp_sinh<double> integrator;
  const auto integrand = [&](double t) {
    return t / tau * student1_pdf(dof, (f_best - t - mean) / tau);
  };
  return integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity());
}

}  // namespace

int cmd_verify(const CommandArgs& args) {
  Json config = load_command_config(args.config_path, args.seed);
  ConfigNode root(config, "");
  const std::uint64_t seed = root.unsigned_integer("seed", 0);
  const double alpha = root.number("alpha", 0.01);
  if (!(alpha > 0.0 && alpha < 1.0)) root.fail("alpha", "must lie in (0, 1)");

  ConfigNode pe = root.child("prior_equivalence");
  const double pe_nu = pe.number("nu", 5.0);
  if (!(pe_nu > 2.0)) pe.fail("nu", "must exceed 2");
  const Eigen::Index pe_dim = pe.integer("dim", 2, 1);
  const Eigen::Index pe_count = pe.integer("count", 20000, 10);
  pe.finish();

  ConfigNode iwp = root.child("iwp_sampler");
  const double iwp_nu = iwp.number("nu", 5.0);
  if (!(iwp_nu > 0.0)) iwp.fail("nu", "must be positive");
  const Eigen::Index iwp_n = iwp.integer("n", 4, 1);
  const Eigen::Index iwp_count = iwp.integer("count", 10000, 10);
  iwp.finish();

  ConfigNode cr = root.child("chain_rule");
  const Eigen::Index cr_instances = cr.integer("instances", 100, 1);
  const double cr_tol = cr.positive("tolerance", 1e-8);
  cr.finish();

  ConfigNode gr = root.child("gradients");
  const Eigen::Index gr_problems = gr.integer("problems", 20, 1);
  const double gr_tol = gr.positive("tolerance", 1e-5);
  gr.finish();

  ConfigNode ei = root.child("ei");
  const Eigen::Index ei_instances = ei.integer("instances", 200, 1);
  const double ei_tol = ei.positive("tolerance", 1e-6);
  const double ei_gauss_tol = ei.positive("gaussian_tolerance", 1e-5);
  ei.finish();

  ConfigNode mg = root.child("multivariate_gamma");
  const Eigen::Index mg_instances = mg.integer("instances", 100, 1);
  const double mg_tol = mg.positive("tolerance", 1e-10);
  mg.finish();

  ConfigNode gl = root.child("gp_limit");
  const Eigen::Index gl_problems = gl.integer("problems", 20, 1);
  const double gl_tol = gl.positive("tolerance", 1e-3);
  gl.finish();

  ConfigNode hooks = root.child("test_hooks");
  const bool corrupt_ei = hooks.boolean("corrupt_ei_sign", false);
  hooks.finish();
  root.finish();

  const std::string hash = config_hash(config);
  const OutputDir out(args.out_dir, seed, hash);
  out.write_json("config.json", config);
  const RngHandle base(seed);
  std::vector<Check> checks;

  {
    RngHandle rng = base.derive(1);
    const PriorEquivalenceReport rep = verify_prior_equivalence(pe_nu, SpdMatrix::identity(pe_dim), pe_count, rng);
    for (const auto& k : rep.checks) checks.push_back(ks_check("prior_equivalence." + k.name, k.statistic, k.p_value, alpha));
  }

  {
    RngHandle rng = base.derive(2);
    std::vector<double> diag;
    diag.reserve(static_cast<std::size_t>(iwp_count));
    for (Eigen::Index c = 0; c < iwp_count; ++c) diag.push_back(iwp_eigen_sample(iwp_nu, iwp_n, rng).reconstruct()(0, 0));
    const auto marginal = stats::ks_one_sample(diag, [&](double x) { return inverse_gamma_cdf(0.5 * iwp_nu, 0.5, x); });
    checks.push_back(ks_check("iwp_sampler.iw1_marginal", marginal.statistic, marginal.p_value, alpha));

    const std::vector<double> radial = iwp_radial_draws(iwp_nu, iwp_n, iwp_count, rng);
    RngHandle ref_rng = base.derive(3);
    std::vector<double> reference;
    reference.reserve(static_cast<std::size_t>(iwp_count));
    for (Eigen::Index c = 0; c < iwp_count; ++c) reference.push_back(1.0 / ref_rng.gamma(0.5 * iwp_nu, 2.0));
    const auto two = stats::ks_two_sample(radial, reference);
    checks.push_back(ks_check("iwp_sampler.radial_vs_inverse_gamma", two.statistic, two.p_value, alpha));
  }

  {
    RngHandle rng = base.derive(4);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < cr_instances; ++i) worst = std::max(worst, chain_rule_error(rng));
    checks.push_back(max_error_check("chain_rule.joint_equals_marginal_times_conditional", worst, cr_tol));
  }

  {
    RngHandle rng = base.derive(5);
    double worst_tp = 0.0;
    double worst_gp = 0.0;
    for (Eigen::Index i = 0; i < gr_problems; ++i) {
      worst_tp = std::max(worst_tp, gradient_error(rng, ModelKind::tp));
      worst_gp = std::max(worst_gp, gradient_error(rng, ModelKind::gp));
    }
    checks.push_back(max_error_check("gradients.tp_vs_finite_differences", worst_tp, gr_tol));
    checks.push_back(max_error_check("gradients.gp_vs_finite_differences", worst_gp, gr_tol));
  }

  {
    RngHandle rng = base.derive(6);
    const auto closed_form = [&](double f_best, double mean, double scale, double dof) {
      double v = ei_tp(f_best, mean, scale, dof);
      if (corrupt_ei) {
        const double tau = std::sqrt(scale);
        const double gamma = (f_best - mean) / tau;
        v -= 2.0 * gamma * tau * student1_cdf(dof, gamma);
      }
      return v;
    };
    double worst_quad = 0.0;
    double worst_gauss = 0.0;
    for (Eigen::Index i = 0; i < ei_instances; ++i) {
      const double mean = uniform_in(rng, -5.0, 5.0);
      const double scale = std::exp(uniform_in(rng, std::log(0.01), std::log(100.0)));
      const double gamma = uniform_in(rng, -3.0, 3.0);
      const double dof = 2.0 + std::exp(uniform_in(rng, std::log(0.5), std::log(100.0)));
      const double f_best = mean + gamma * std::sqrt(scale);
      const double q = ei_quadrature(f_best, mean, scale, dof);
      worst_quad = std::max(worst_quad, std::abs(closed_form(f_best, mean, scale, dof) - q) / q);

      const double g2 = uniform_in(rng, -2.0, 3.0);
      const double fb2 = mean + g2 * std::sqrt(scale);
      const double ref = ei_gaussian(fb2, mean, scale);
      worst_gauss = std::max(worst_gauss, std::abs(closed_form(fb2, mean, scale, 1e6) - ref) / ref);
    }
    checks.push_back(max_error_check("ei.closed_form_vs_quadrature", worst_quad, ei_tol));
    checks.push_back(max_error_check("ei.gaussian_limit", worst_gauss, ei_gauss_tol));
  }

  {
    RngHandle rng = base.derive(7);
    double worst_rec = 0.0;
    double worst_ratio = 0.0;
    for (Eigen::Index i = 0; i < mg_instances; ++i) {
      const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.next_u64() % 9);
      const double a = 0.5 * static_cast<double>(n) + uniform_in(rng, 0.01, 20.0);
      const double rec = mv_gamma_ln(n, a) -
                         (0.5 * static_cast<double>(n - 1) * std::log(std::numbers::pi) + std::lgamma(a) +
                          mv_gamma_ln(n - 1, a - 0.5));
      worst_rec = std::max(worst_rec, std::abs(std::expm1(rec)));
      const double ratio = (mv_gamma_ln(n, a) - mv_gamma_ln(n, a - 0.5)) -
                           (std::lgamma(a) - std::lgamma(a - 0.5 * static_cast<double>(n)));
      worst_ratio = std::max(worst_ratio, std::abs(std::expm1(ratio)));
    }
    checks.push_back(max_error_check("multivariate_gamma.recursion", worst_rec, mg_tol));
    checks.push_back(max_error_check("multivariate_gamma.ratio", worst_ratio, mg_tol));
  }

  {
    RngHandle rng = base.derive(8);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < gl_problems; ++i) {
      const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.next_u64() % 18);
      const KernelSpec spec{KernelFamily::squared_exponential_ard, 1, true};
      const HyperParams hp = HyperParams::make(KernelParams::from_values(1.0, VectorXd::Ones(1), 0.1), 1e6, 0.0);
      const MatrixXd x = rng.normal_matrix(n, 1);
      const Dataset data{x, cholesky(gram(spec, hp.kernel, x)).lower * rng.normal_vector(n)};
      const ProcessPosterior post(data, hp, spec);
      const MatrixXd xs = rng.normal_matrix(4, 1);
      const PredictiveDist t = post.predict_tp(xs, true);
      const GaussianPredictive g = post.predict_gp(xs, true);
      worst = std::max({worst, std::abs(tp_log_marginal(data, hp, spec) - gp_log_marginal(data, hp, spec)),
                        (t.mean - g.mean).norm() / std::max(g.mean.norm(), 1e-300),
                        (t.scale.matrix() - g.cov.matrix()).norm() / g.cov.matrix().norm()});
    }
    checks.push_back(max_error_check("gp_limit.nu_1e6", worst, gl_tol));
  }

  bool all = true;
  std::ofstream report = out.open("report.txt");
  for (const auto& c : checks) {
    all = all && c.pass;
    report << c.name << " statistic=" << fmt(c.statistic) << " threshold=" << c.threshold
           << " p_value=" << (std::isnan(c.p_value) ? std::string("na") : fmt(c.p_value)) << ' '
           << (c.pass ? "PASS" : "FAIL") << '\n';
  }
  report << "overall " << (all ? "PASS" : "FAIL") << '\n';
  return all ? 0 : 3;
}

}  // namespace tprocess::cli
