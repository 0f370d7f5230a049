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
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "tprocess/cli/commands.hpp"
#include "tprocess/cli/config.hpp"
#include "tprocess/cli/output.hpp"
#include "tprocess/distributions.hpp"
#include "tprocess/error.hpp"
#include "tprocess/kernels.hpp"

namespace tprocess::cli {

namespace {

VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

SpdMatrix spd_from(ConfigNode& node, const std::string& key, const MatrixXd& def) {
  const MatrixXd m = node.matrix(key, def);
  try {
    SpdMatrix s(m);
    cholesky(s);
    return s;
  } catch (const Error& e) {
    node.fail(key, std::string("must be a symmetric positive definite matrix (") + e.what() + ")");
  }
}

void write_matrix_rows(CsvWriter& csv, const MatrixXd& rows) {
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) csv.cell(rows(i, j));
    csv.end_row();
  }
}

}  // namespace

int cmd_sample(const CommandArgs& args) {
  Json config = load_command_config(args.config_path, args.seed);
  ConfigNode root(config, "");
  const std::uint64_t seed = root.unsigned_integer("seed", 0);
  const std::string sampler =
      root.choice("sampler", "mvt", {"mvt", "iw", "iwp_eigen", "elliptical", "prior_functions"});
  const Eigen::Index count = root.integer("count", 1000, 1);

  ConfigNode mvt_node = root.child("mvt");
  const double mvt_nu = mvt_node.number("nu", 5.0);
  if (!(mvt_nu > 2.0)) mvt_node.fail("nu", "must exceed 2");
  const VectorXd mvt_mean = to_vector(mvt_node.numbers("mean", {0.0, 0.0}));
  const SpdMatrix mvt_cov = spd_from(mvt_node, "cov", MatrixXd::Identity(2, 2));
  if (mvt_cov.dim() != mvt_mean.size()) mvt_node.fail("cov", "dimension must match mean");
  mvt_node.finish();

  ConfigNode iw_node = root.child("iw");
  const double iw_nu = iw_node.positive("nu", 5.0);
  const SpdMatrix iw_base = spd_from(iw_node, "base", MatrixXd::Identity(2, 2));
  iw_node.finish();

  ConfigNode eig_node = root.child("iwp_eigen");
  const double eig_nu = eig_node.positive("nu", 5.0);
  const Eigen::Index eig_n = eig_node.integer("n", 4, 1);
  eig_node.finish();

  ConfigNode ell_node = root.child("elliptical");
  EllipticalSpec ell;
  ell.kind = ell_node.choice("kind", "student_t", {"gaussian", "student_t"}) == "gaussian"
                 ? EllipticalSpec::Kind::gaussian
                 : EllipticalSpec::Kind::student_t;
  ell.nu = ell_node.number("nu", 5.0);
  if (ell.kind == EllipticalSpec::Kind::student_t && !(ell.nu > 2.0)) ell_node.fail("nu", "must exceed 2");
  ell.mu = to_vector(ell_node.numbers("mu", {0.0, 0.0}));
  ell.omega = ell_node.matrix("omega", MatrixXd::Identity(2, 2));
  if (ell.omega.rows() != ell.mu.size()) ell_node.fail("omega", "needs one row per entry of mu");
  ell_node.finish();

  ConfigNode pf_node = root.child("prior_functions");
  const double pf_nu = pf_node.number("nu", 5.0);
  if (!(pf_nu > 2.0)) pf_node.fail("nu", "must exceed 2");
  const std::string mean_fn = pf_node.choice("mean_function", "cos", {"cos", "zero"});
  const int curves = static_cast<int>(pf_node.integer("curves", 5, 1));
  const double level = pf_node.number("level", 0.95);
  if (!(level > 0.0 && level < 1.0)) pf_node.fail("level", "must lie in (0, 1)");
  ConfigNode grid_node = pf_node.child("grid");
  const double g_low = grid_node.number("low", 0.0);
  const double g_high = grid_node.number("high", 2.0 * std::numbers::pi);
  const Eigen::Index g_points = grid_node.integer("points", 200, 2);
  if (!(g_high > g_low)) grid_node.fail("high", "must exceed low");
  grid_node.finish();
  ConfigNode pk_node = pf_node.child("kernel");
  const std::string pk_family =
      pk_node.choice("family", "squared_exponential_ard", {"squared_exponential_ard", "matern52_ard"});
  const double pk_amp = pk_node.positive("amplitude", 0.01);
  const double pk_ls = pk_node.positive("lengthscale", 1.0 / std::sqrt(40.0));
  pk_node.finish();
  pf_node.finish();
  root.finish();

  const std::string hash = config_hash(config);
  const OutputDir out(args.out_dir, seed, hash);
  out.write_json("config.json", config);
  RngHandle rng = RngHandle(seed).derive(1);

  if (sampler == "prior_functions") {
    const VectorXd x = VectorXd::LinSpaced(g_points, g_low, g_high);
    const KernelSpec spec{kernel_family_from_string(pk_family), 1, false};
    const KernelParams params = KernelParams::from_values(pk_amp, VectorXd::Constant(1, pk_ls), 0.0);
    const SpdMatrix k = gram(spec, params, MatrixXd(x));
    const VectorXd h = mean_fn == "cos" ? VectorXd(x.array().cos()) : VectorXd(VectorXd::Zero(g_points));
    const MatrixXd tp = mvt_sample(MvtParams{pf_nu, h, k}, curves, rng);
    RngHandle gp_rng = RngHandle(seed).derive(2);
    const CholFactor f = cholesky(k);
    MatrixXd gp(curves, g_points);
    for (int c = 0; c < curves; ++c) gp.row(c) = (h + f.lower * gp_rng.normal_vector(g_points)).transpose();

    const double p = 0.5 + 0.5 * level;
    const double zt = student1_quantile(pf_nu, p);
    const double zg = boost::math::quantile(boost::math::normal_distribution<double>(), p);
    std::ofstream file = out.open("functions.csv");
    CsvWriter csv(file);
    csv.cell("x").cell("mean").cell("tp_lower").cell("tp_upper").cell("gp_lower").cell("gp_upper");
    for (int c = 0; c < curves; ++c) csv.cell("tp_" + std::to_string(c));
    for (int c = 0; c < curves; ++c) csv.cell("gp_" + std::to_string(c));
    csv.end_row();
    for (Eigen::Index i = 0; i < g_points; ++i) {
      const double sd = std::sqrt(k(i, i));
      csv.cell(x(i)).cell(h(i)).cell(h(i) - zt * sd).cell(h(i) + zt * sd).cell(h(i) - zg * sd).cell(h(i) + zg * sd);
      for (int c = 0; c < curves; ++c) csv.cell(tp(c, i));
      for (int c = 0; c < curves; ++c) csv.cell(gp(c, i));
      csv.end_row();
    }
    return 0;
  }

  std::ofstream file = out.open("draws.csv");
  CsvWriter csv(file);
  const auto header = [&](const std::string& prefix, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i) csv.cell(prefix + std::to_string(i));
  };
  const auto matrix_header = [&](const std::string& prefix, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) csv.cell(prefix + std::to_string(i) + "_" + std::to_string(j));
  };

  if (sampler == "mvt") {
    header("y", mvt_mean.size());
    csv.end_row();
    write_matrix_rows(csv, mvt_sample(MvtParams{mvt_nu, mvt_mean, mvt_cov}, count, rng));
  } else if (sampler == "elliptical") {
    header("y", ell.mu.size());
    csv.end_row();
    write_matrix_rows(csv, elliptical_sample(ell, count, rng));
  } else if (sampler == "iw") {
    const Eigen::Index n = iw_base.dim();
    matrix_header("s", n);
    csv.end_row();
    const IwParams p{iw_nu, iw_base};
    for (Eigen::Index c = 0; c < count; ++c) {
      const SpdMatrix s = iw_sample(p, rng);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) csv.cell(s(i, j));
      csv.end_row();
    }
  } else {
    header("lambda", eig_n);
    matrix_header("q", eig_n);
    csv.end_row();
    for (Eigen::Index c = 0; c < count; ++c) {
      const EigenIwSample s = iwp_eigen_sample(eig_nu, eig_n, rng);
      for (Eigen::Index i = 0; i < eig_n; ++i) csv.cell(s.lambda(i));
      for (Eigen::Index i = 0; i < eig_n; ++i)
        for (Eigen::Index j = 0; j < eig_n; ++j) csv.cell(s.q(i, j));
      csv.end_row();
    }
  }
  return 0;
}

}  // namespace tprocess::cli
