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
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tprocess/bayesopt.hpp"
#include "tprocess/kernels.hpp"
#include "tprocess/tp_model.hpp"

namespace tprocess::cli {

using Json = nlohmann::json;

/// Strict view of one JSON object. Each accessor marks its key as known and
/// writes the default back when the key is absent, so the tree becomes the
/// fully materialized config. finish() rejects any key never asked for.
class ConfigNode {
 public:
  ConfigNode(Json& node, std::string path);

  double number(const std::string& key, double def);
  double positive(const std::string& key, double def);
  std::int64_t integer(const std::string& key, std::int64_t def, std::int64_t min_value);
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def);
  bool boolean(const std::string& key, bool def);
  std::string text(const std::string& key, const std::string& def);
  std::string choice(const std::string& key, const std::string& def, std::initializer_list<const char*> allowed);
  std::vector<std::string> choice_list(const std::string& key, const std::vector<std::string>& def,
                                       std::initializer_list<const char*> allowed);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& def);
  /// List of equal-length rows. An empty default echoes as null.
  MatrixXd matrix(const std::string& key, const MatrixXd& def);
  ConfigNode child(const std::string& key);

  void finish() const;
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;
  std::string where(const std::string& key) const;

 private:
  Json& slot(const std::string& key);

  Json* node_;
  std::string path_;
  std::set<std::string> known_;
};

/// Reads a JSON config, ignoring lines whose first non-blank character is '#'.
Json load_config(const std::string& path);

/// load_config(path), or an empty object for an empty path, with "seed"
/// replaced by the override when one is given.
Json load_command_config(const std::string& path, std::optional<std::uint64_t> seed);

/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const Json& config);

/// Kernel block shared by the commands.
struct KernelSetup {
  KernelSpec spec;
  KernelParams params;
};
KernelSetup parse_kernel(ConfigNode node, Eigen::Index input_dim, const std::string& default_family,
                         bool default_noise);

PriorSet parse_priors(ConfigNode node);
OptimizerConfig parse_optimizer(ConfigNode node);
SamplerConfig parse_sampler(ConfigNode node, const SamplerConfig& defaults);
SearchConfig parse_search(ConfigNode node);

}  // namespace tprocess::cli
