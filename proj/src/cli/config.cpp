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

#include "tprocess/cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tprocess/error.hpp"

namespace tprocess::cli {

ConfigNode::ConfigNode(Json& node, std::string path) : node_(&node), path_(std::move(path)) {
  if (node_->is_null()) *node_ = Json::object();
  if (!node_->is_object()) throw ConfigError(path_.empty() ? "config must be an object" : path_ + " must be an object");
}

std::string ConfigNode::where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

void ConfigNode::fail(const std::string& key, const std::string& message) const {
  throw ConfigError(where(key) + ": " + message);
}

Json& ConfigNode::slot(const std::string& key) {
  known_.insert(key);
  return (*node_)[key];
}

double ConfigNode::number(const std::string& key, double def) {
  Json& v = slot(key);
  if (v.is_null()) v = def;
  if (!v.is_number()) fail(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(key, "must be finite");
  return x;
}

double ConfigNode::positive(const std::string& key, double def) {
  const double x = number(key, def);
  if (!(x > 0.0)) fail(key, "must be positive");
  return x;
}

std::int64_t ConfigNode::integer(const std::string& key, std::int64_t def, std::int64_t min_value) {
  Json& v = slot(key);
  if (v.is_null()) v = def;
  if (!v.is_number_integer()) fail(key, "expected an integer");
  const std::int64_t x = v.get<std::int64_t>();
  if (x < min_value) fail(key, "must be at least " + std::to_string(min_value));
  return x;
}

std::uint64_t ConfigNode::unsigned_integer(const std::string& key, std::uint64_t def) {
  Json& v = slot(key);
  if (v.is_null()) v = def;
  if (!v.is_number_unsigned()) fail(key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool ConfigNode::boolean(const std::string& key, bool def) {
  Json& v = slot(key);
  if (v.is_null()) v = def;
  if (!v.is_boolean()) fail(key, "expected true or false");
  return v.get<bool>();
}

std::string ConfigNode::text(const std::string& key, const std::string& def) {
  Json& v = slot(key);
  if (v.is_null()) v = def;
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

std::string ConfigNode::choice(const std::string& key, const std::string& def,
                               std::initializer_list<const char*> allowed) {
  const std::string s = text(key, def);
  std::string options;
  for (const char* a : allowed) {
    if (s == a) return s;
    options += options.empty() ? a : std::string(", ") + a;
  }
  fail(key, "'" + s + "' is not one of: " + options);
}

std::vector<std::string> ConfigNode::choice_list(const std::string& key, const std::vector<std::string>& def,
                                                 std::initializer_list<const char*> allowed) {
  Json& v = slot(key);
  if (v.is_null()) v = def;
  if (!v.is_array() || v.empty()) fail(key, "expected a nonempty list of strings");
  std::vector<std::string> out;
  for (const Json& e : v) {
    if (!e.is_string()) fail(key, "expected a nonempty list of strings");
    const std::string s = e.get<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || s == a;
    if (!ok) fail(key, "unknown entry '" + s + "'");
    for (const auto& prev : out) {
      if (prev == s) fail(key, "duplicate entry '" + s + "'");
    }
    out.push_back(s);
  }
  return out;
}

std::vector<double> ConfigNode::numbers(const std::string& key, const std::vector<double>& def) {
  Json& v = slot(key);
  if (v.is_null()) v = def;
  if (!v.is_array()) fail(key, "expected a list of numbers");
  std::vector<double> out;
  for (const Json& e : v) {
    if (!e.is_number() || !std::isfinite(e.get<double>())) fail(key, "expected a list of finite numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

MatrixXd ConfigNode::matrix(const std::string& key, const MatrixXd& def) {
  Json& v = slot(key);
  if (v.is_null()) {
    if (def.size() == 0) return def;
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < def.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index j = 0; j < def.cols(); ++j) row.push_back(def(i, j));
      rows.push_back(row);
    }
    v = rows;
  }
  if (!v.is_array() || v.empty()) fail(key, "expected a nonempty list of rows");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  if (cols == 0) fail(key, "rows must be nonempty lists of numbers");
  MatrixXd m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array() || v[i].size() != cols) fail(key, "rows must all have the same length");
    for (std::size_t j = 0; j < cols; ++j) {
      const Json& e = v[i][j];
      if (!e.is_number() || !std::isfinite(e.get<double>())) fail(key, "entries must be finite numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = e.get<double>();
    }
  }
  return m;
}

ConfigNode ConfigNode::child(const std::string& key) {
  Json& v = slot(key);
  if (!v.is_null() && !v.is_object()) fail(key, "expected an object");
  return ConfigNode(v, where(key));
}

void ConfigNode::finish() const {
  for (const auto& item : node_->items()) {
    if (!known_.count(item.key())) throw ConfigError(where(item.key()) + ": unknown key");
  }
}

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream body;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string::npos && line[first] == '#') {
      body << '\n';
      continue;
    }
    body << line << '\n';
  }
  try {
    return Json::parse(body.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

Json load_command_config(const std::string& path, std::optional<std::uint64_t> seed) {
  Json j = path.empty() ? Json::object() : load_config(path);
  if (!j.is_object()) throw ConfigError("config must be an object");
  if (seed) j["seed"] = *seed;
  return j;
}

std::string config_hash(const Json& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

KernelSetup parse_kernel(ConfigNode node, Eigen::Index input_dim, const std::string& default_family,
                         bool default_noise) {
  KernelSetup k;
  const std::string family =
      node.choice("family", default_family, {"squared_exponential_ard", "matern52_ard"});
  k.spec = KernelSpec{kernel_family_from_string(family), input_dim, node.boolean("include_noise", default_noise)};
  const double amplitude = node.positive("amplitude", 1.0);
  std::vector<double> ls = node.numbers("lengthscales", std::vector<double>(static_cast<std::size_t>(input_dim), 1.0));
  if (static_cast<Eigen::Index>(ls.size()) != input_dim) {
    node.fail("lengthscales", "needs one entry per input dimension (" + std::to_string(input_dim) + ")");
  }
  for (double l : ls) {
    if (!(l > 0.0)) node.fail("lengthscales", "entries must be positive");
  }
  const double noise = node.positive("noise", 0.1);
  node.finish();
  k.params = KernelParams::from_values(amplitude, Eigen::Map<const VectorXd>(ls.data(), input_dim),
                                       k.spec.include_noise ? noise : 0.0);
  return k;
}

namespace {

NormalPrior parse_normal(ConfigNode node, NormalPrior def) {
  NormalPrior p{node.number("mean", def.mean), node.positive("sd", def.sd)};
  node.finish();
  return p;
}

}  // namespace

PriorSet parse_priors(ConfigNode node) {
  PriorSet d;
  PriorSet p;
  p.log_amplitude = parse_normal(node.child("log_amplitude"), d.log_amplitude);
  p.log_lengthscale = parse_normal(node.child("log_lengthscale"), d.log_lengthscale);
  p.log_noise = parse_normal(node.child("log_noise"), d.log_noise);
  p.nu_tilde = parse_normal(node.child("nu_tilde"), d.nu_tilde);
  p.mean = parse_normal(node.child("mean"), d.mean);
  node.finish();
  return p;
}

OptimizerConfig parse_optimizer(ConfigNode node) {
  OptimizerConfig d;
  OptimizerConfig c;
  c.max_iterations = static_cast<int>(node.integer("max_iterations", d.max_iterations, 1));
  c.gradient_tolerance = node.positive("gradient_tolerance", d.gradient_tolerance);
  c.restarts = static_cast<int>(node.integer("restarts", d.restarts, 1));
  c.restart_scale = node.positive("restart_scale", d.restart_scale);
  node.finish();
  return c;
}

SamplerConfig parse_sampler(ConfigNode node, const SamplerConfig& d) {
  SamplerConfig c;
  c.samples = static_cast<int>(node.integer("samples", d.samples, 1));
  c.burn_in = static_cast<int>(node.integer("burn_in", d.burn_in, 0));
  c.thin = static_cast<int>(node.integer("thin", d.thin, 1));
  c.initial_width = node.positive("initial_width", d.initial_width);
  c.max_step_out = static_cast<int>(node.integer("max_step_out", d.max_step_out, 0));
  node.finish();
  return c;
}

SearchConfig parse_search(ConfigNode node) {
  SearchConfig d;
  SearchConfig c;
  c.candidates_per_dim = static_cast<int>(node.integer("candidates_per_dim", d.candidates_per_dim, 1));
  c.refine_top = static_cast<int>(node.integer("refine_top", d.refine_top, 0));
  c.refine_steps = static_cast<int>(node.integer("refine_steps", d.refine_steps, 0));
  node.finish();
  return c;
}

}  // namespace tprocess::cli
